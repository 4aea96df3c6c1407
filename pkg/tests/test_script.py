import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from focus360.script import (
    EmptyScriptError,
    InvalidIntervalError,
    SchemaError,
    Script,
    ScriptEntry,
    ScriptSyntaxError,
    from_csv,
    parse_roadmap,
    to_csv,
)


def test_parse_basic_line():
    s = parse_roadmap("0:12 - 0:25 : the farthest turtle")
    assert s.entries == (ScriptEntry(12.0, 25.0, "the farthest turtle"),)


def test_inverted_interval():
    with pytest.raises(InvalidIntervalError):
        parse_roadmap("5 - 4 : elephant")


def test_comments_blank_lines_and_sorting():
    s = parse_roadmap("# comment\n\n1:00-1:30: lion\n0:05-0:10: zebra")
    assert [(e.start, e.end, e.description) for e in s.entries] == [
        (5.0, 10.0, "zebra"),
        (60.0, 90.0, "lion"),
    ]


@pytest.mark.parametrize(
    "token,expected",
    [
        ("7", 7.0),
        ("7.25", 7.25),
        ("1:07", 67.0),
        ("2:03.5", 123.5),
        ("0:00.001", 0.001),
    ],
)
def test_time_forms(token, expected):
    s = parse_roadmap(f"{token} - 999 : thing")
    assert s.entries[0].start == expected


def test_seconds_overflow_rejected():
    with pytest.raises(ScriptSyntaxError) as exc:
        parse_roadmap("1:75 - 3:00 : thing")
    assert exc.value.line == 1


def test_malformed_line_reports_position():
    with pytest.raises(ScriptSyntaxError) as exc:
        parse_roadmap("ok 1 - 2 : x\n")
    assert exc.value.line == 1


def test_empty_roadmap():
    with pytest.raises(EmptyScriptError):
        parse_roadmap("# nothing here\n\n")


def test_to_csv_exact_bytes():
    s = Script((ScriptEntry(12.0, 25.0, "the farthest turtle"),))
    assert to_csv(s) == "start_seconds,end_seconds,description\n12.0,25.0,the farthest turtle\n"


def test_to_csv_quoting():
    s = Script((ScriptEntry(0.0, 1.0, 'a, "b"'),))
    assert to_csv(s) == 'start_seconds,end_seconds,description\n0.0,1.0,"a, ""b"""\n'


def test_empty_script_unrepresentable():
    with pytest.raises(EmptyScriptError):
        Script(())


def test_from_csv_roundtrip():
    s = parse_roadmap("3-9: fox\n0:05 - 0:10.5 : owl, \"the brown one\"")
    assert from_csv(to_csv(s)) == s


def test_from_csv_crlf_tolerant():
    doc = "start_seconds,end_seconds,description\r\n12.0,25.0,turtle\r\n"
    s = from_csv(doc)
    assert s.entries == (ScriptEntry(12.0, 25.0, "turtle"),)


def test_from_csv_extra_columns_warn():
    doc = "start_seconds,end_seconds,description,extra\n1.0,2.0,cat,junk\n"
    with pytest.warns(UserWarning):
        s = from_csv(doc)
    assert s.entries[0].description == "cat"


def test_from_csv_bad_header():
    with pytest.raises(SchemaError):
        from_csv("begin,end,desc\n1,2,cat\n")


def test_from_csv_row_errors_carry_row_number():
    doc = "start_seconds,end_seconds,description\n1.0,2.0,cat\nbogus,3.0,dog\n"
    with pytest.raises(SchemaError, match="row 3"):
        from_csv(doc)


def test_quoted_description_row():
    doc = 'start_seconds,end_seconds,description\n12.0,25.0,"the farthest turtle"\n'
    assert from_csv(doc).entries[0].description == "the farthest turtle"


class TestActiveEntries:
    def setup_method(self):
        self.script = Script(
            (
                ScriptEntry(5.0, 10.0, "a"),
                ScriptEntry(8.0, 12.0, "b"),
            )
        )

    def test_before_all(self):
        assert self.script.active_entries(1.0) == []

    def test_half_open_boundaries(self):
        assert self.script.active_entries(5.0) == [0]
        assert self.script.active_entries(10.0) == [1]

    def test_overlap(self):
        assert self.script.active_entries(9.0) == [0, 1]

    def test_shrinking_never_adds(self):
        smaller = Script((ScriptEntry(6.0, 9.0, "a"), ScriptEntry(8.0, 12.0, "b")))
        for t in [x / 4 for x in range(0, 60)]:
            if 0 in smaller.active_entries(t):
                assert 0 in self.script.active_entries(t)


def test_control_characters_rejected():
    with pytest.raises(ValueError):
        ScriptEntry(0.0, 1.0, "bad\x07desc")


def test_description_length_cap():
    with pytest.raises(ValueError):
        ScriptEntry(0.0, 1.0, "x" * 1025)


descriptions = st.text(
    alphabet=st.characters(
        codec="utf-8", exclude_categories=("Cc", "Cs"), exclude_characters="\r\n"
    ),
    min_size=1,
    max_size=60,
).filter(lambda s: s.strip() == s and s)

times = st.floats(0.0, 3600.0, allow_nan=False).map(lambda x: round(x, 3))


durations = st.floats(0.001, 600.0, allow_nan=False).map(lambda x: round(x, 3))


@st.composite
def scripts(draw):
    n = draw(st.integers(1, 6))
    entries = []
    for _ in range(n):
        a = draw(times)
        b = round(a + draw(durations), 3)
        entries.append(ScriptEntry(a, b, draw(descriptions)))
    return Script(tuple(entries))


@settings(max_examples=200)
@given(scripts())
def test_csv_roundtrip_property(script):
    assert from_csv(to_csv(script)) == script
