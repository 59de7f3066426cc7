import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tabrebal.errors import (
    EmptyFileError,
    InvalidTargetError,
    MalformedRowError,
    MissingColumnError,
    NumericParseError,
    SchemaMismatchError,
    UnknownCategoryError,
    UnknownColumnError,
)
from tabrebal.table import (
    ColumnKind,
    Schema,
    concat_tables,
    from_columns,
    load_csv,
    parse_predicate,
    write_csv,
)

SCHEMA = Schema(
    names=("age", "color", "label"),
    kinds=(ColumnKind.NUMERIC, ColumnKind.CATEGORICAL, ColumnKind.CATEGORICAL),
    target="label",
    positive_label="yes",
)


def write(tmp_path, text, name="t.csv"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


CSV = "age,color,label\n30,red,yes\n40,blue,no\n50,red,no\n"


class TestSchema:
    def test_text_round_trip(self):
        assert Schema.from_text(SCHEMA.to_text()) == SCHEMA

    def test_comments_and_blanks_ignored(self):
        text = "# comment\n\nage:numeric\ncolor:categorical\nlabel:categorical\ntarget: label\npositive_label: yes\n"
        assert Schema.from_text(text) == SCHEMA

    def test_missing_target_line(self):
        with pytest.raises(ValueError):
            Schema.from_text("a:numeric\nlabel:categorical\npositive_label: yes\n")

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            Schema.from_text("a:integer\ntarget: a\npositive_label: x\n")

    def test_target_must_be_categorical(self):
        with pytest.raises(ValueError):
            Schema(("a",), (ColumnKind.NUMERIC,), "a", "x")

    def test_duplicate_names(self):
        with pytest.raises(ValueError):
            Schema(
                ("a", "a"),
                (ColumnKind.NUMERIC, ColumnKind.CATEGORICAL),
                "a",
                "x",
            )

    def test_feature_helpers(self):
        assert SCHEMA.feature_names == ("age", "color")
        assert SCHEMA.numeric_features == ("age",)
        assert SCHEMA.categorical_features == ("color",)

    def test_kind_of_unknown(self):
        with pytest.raises(UnknownColumnError):
            SCHEMA.kind_of("nope")


class TestLoadCsv:
    def test_basic(self, tmp_path):
        t = load_csv(write(tmp_path, CSV), SCHEMA)
        assert t.n_rows == 3
        assert t.column("age").tolist() == [30.0, 40.0, 50.0]
        # dictionaries are in first-appearance order
        assert t.dictionary("color") == ("red", "blue")
        assert t.column("color").tolist() == [0, 1, 0]
        assert t.decode_column("color") == ["red", "blue", "red"]
        assert t.y.tolist() == [1, 0, 0]
        assert t.positive_count == 1
        assert t.negative_count == 2

    def test_header_order_independent(self, tmp_path):
        shuffled = "label,age,color\nyes,30,red\nno,40,blue\nno,50,red\n"
        assert load_csv(write(tmp_path, shuffled), SCHEMA) == load_csv(
            write(tmp_path, CSV, "u.csv"), SCHEMA
        )

    def test_empty_file(self, tmp_path):
        with pytest.raises(EmptyFileError):
            load_csv(write(tmp_path, ""), SCHEMA)

    def test_header_only(self, tmp_path):
        with pytest.raises(EmptyFileError):
            load_csv(write(tmp_path, "age,color,label\n"), SCHEMA)

    def test_missing_column(self, tmp_path):
        with pytest.raises(MissingColumnError):
            load_csv(write(tmp_path, "age,label\n30,yes\n"), SCHEMA)

    def test_extra_column(self, tmp_path):
        with pytest.raises(UnknownColumnError):
            load_csv(
                write(tmp_path, "age,color,label,zz\n30,red,yes,1\n"), SCHEMA
            )

    def test_ragged_row(self, tmp_path):
        with pytest.raises(MalformedRowError):
            load_csv(write(tmp_path, "age,color,label\n30,red\n"), SCHEMA)

    def test_numeric_parse_error(self, tmp_path):
        with pytest.raises(NumericParseError):
            load_csv(write(tmp_path, "age,color,label\nold,red,yes\n"), SCHEMA)

    def test_empty_numeric_cell(self, tmp_path):
        with pytest.raises(NumericParseError):
            load_csv(write(tmp_path, "age,color,label\n,red,yes\n"), SCHEMA)

    def test_non_finite_rejected(self, tmp_path):
        with pytest.raises(NumericParseError):
            load_csv(write(tmp_path, "age,color,label\nnan,red,yes\n"), SCHEMA)

    def test_empty_categorical_becomes_missing(self, tmp_path):
        t = load_csv(write(tmp_path, "age,color,label\n30,,yes\n40,red,no\n"), SCHEMA)
        assert t.decode_column("color") == ["_missing_", "red"]

    def test_question_mark_is_ordinary(self, tmp_path):
        t = load_csv(write(tmp_path, "age,color,label\n30,?,yes\n40,red,no\n"), SCHEMA)
        assert "?" in t.dictionary("color")

    def test_target_three_values(self, tmp_path):
        with pytest.raises(InvalidTargetError):
            load_csv(
                write(tmp_path, "age,color,label\n1,r,a\n2,r,b\n3,r,c\n"), SCHEMA
            )

    def test_positive_label_absent(self, tmp_path):
        with pytest.raises(InvalidTargetError):
            load_csv(write(tmp_path, "age,color,label\n1,r,a\n2,r,b\n"), SCHEMA)

    def test_single_class_load_allowed(self, tmp_path):
        t = load_csv(write(tmp_path, "age,color,label\n1,r,no\n2,r,no\n"), SCHEMA)
        assert t.positive_count == 0


class TestWriteCsv:
    def test_round_trip_exact(self, tmp_path):
        t = load_csv(write(tmp_path, CSV), SCHEMA)
        out = str(tmp_path / "out.csv")
        write_csv(t, out)
        assert load_csv(out, SCHEMA) == t

    def test_float_precision_survives(self, tmp_path):
        text = "age,color,label\n0.1,red,yes\n0.30000000000000004,blue,no\n"
        t = load_csv(write(tmp_path, text), SCHEMA)
        out = str(tmp_path / "out.csv")
        write_csv(t, out)
        assert load_csv(out, SCHEMA).column("age").tolist() == t.column("age").tolist()


class TestTableOps:
    def test_filter_rows_mask(self, tmp_path):
        t = load_csv(write(tmp_path, CSV), SCHEMA)
        sub = t.filter_rows(np.array([True, False, True]))
        assert sub.n_rows == 2
        assert sub.decode_column("color") == ["red", "red"]
        assert sub.dictionary("color") == t.dictionary("color")

    def test_filter_rows_indices(self, tmp_path):
        t = load_csv(write(tmp_path, CSV), SCHEMA)
        sub = t.filter_rows(np.array([2, 0]))
        assert sub.column("age").tolist() == [50.0, 30.0]

    def test_columns_read_only(self, tmp_path):
        t = load_csv(write(tmp_path, CSV), SCHEMA)
        with pytest.raises(ValueError):
            t.column("age")[0] = 99.0

    def test_concat(self, tmp_path):
        t = load_csv(write(tmp_path, CSV), SCHEMA)
        both = concat_tables([t, t.filter_rows(np.array([0]))])
        assert both.n_rows == 4
        assert both.column("age").tolist() == [30.0, 40.0, 50.0, 30.0]

    def test_concat_dictionary_mismatch(self, tmp_path):
        t1 = load_csv(write(tmp_path, CSV), SCHEMA)
        t2 = load_csv(
            write(tmp_path, "age,color,label\n1,green,yes\n2,red,no\n", "g.csv"),
            SCHEMA,
        )
        with pytest.raises(SchemaMismatchError):
            concat_tables([t1, t2])

    def test_from_columns(self):
        t = from_columns(
            SCHEMA,
            {
                "age": np.array([1.0, 2.0]),
                "color": np.array([0, 1]),
                "label": np.array([0, 1]),
            },
            {"color": ("blue", "red"), "label": ("no", "yes")},
        )
        assert t.n_rows == 2
        assert t.y.tolist() == [0, 1]

    def test_from_columns_code_out_of_range(self):
        with pytest.raises(UnknownCategoryError):
            from_columns(
                SCHEMA,
                {
                    "age": np.array([1.0]),
                    "color": np.array([5]),
                    "label": np.array([0]),
                },
                {"color": ("blue",), "label": ("no", "yes")},
            )


class TestPredicate:
    def fixture(self, tmp_path):
        return load_csv(write(tmp_path, CSV), SCHEMA)

    def test_categorical_equality(self, tmp_path):
        t = self.fixture(tmp_path)
        assert parse_predicate("color=red").mask(t).tolist() == [True, False, True]

    def test_numeric_range(self, tmp_path):
        t = self.fixture(tmp_path)
        assert parse_predicate("age=35..50").mask(t).tolist() == [False, True, True]

    def test_numeric_exact(self, tmp_path):
        t = self.fixture(tmp_path)
        assert parse_predicate("age=40").mask(t).tolist() == [False, True, False]

    def test_conjunction(self, tmp_path):
        t = self.fixture(tmp_path)
        m = parse_predicate("color=red & age=45..60").mask(t)
        assert m.tolist() == [False, False, True]

    def test_unknown_column(self, tmp_path):
        with pytest.raises(UnknownColumnError):
            parse_predicate("nope=1").mask(self.fixture(tmp_path))

    def test_unknown_category(self, tmp_path):
        with pytest.raises(UnknownCategoryError):
            parse_predicate("color=green").mask(self.fixture(tmp_path))

    def test_bad_clause(self):
        with pytest.raises(ValueError):
            parse_predicate("color")

    def test_bad_numeric_value(self, tmp_path):
        with pytest.raises(NumericParseError):
            parse_predicate("age=tall").mask(self.fixture(tmp_path))


names = st.text(
    alphabet="abcdefghij, \"'", min_size=1, max_size=8
).filter(lambda s: s.strip() == s and s != "_missing_")


@settings(max_examples=50, deadline=None)
@given(
    ages=st.lists(
        st.floats(allow_nan=False, allow_infinity=False, width=64),
        min_size=1,
        max_size=20,
    ),
    data=st.data(),
)
def test_round_trip_property(tmp_path_factory, ages, data):
    n = len(ages)
    colors = data.draw(st.lists(names, min_size=n, max_size=n))
    labels = data.draw(
        st.lists(st.sampled_from(["yes", "no"]), min_size=n, max_size=n)
    )
    p = tmp_path_factory.mktemp("rt") / "x.csv"
    rows = "\n".join(
        f"{repr(a)},{q(c)},{l}" for a, c, l in zip(ages, colors, labels)
    )
    p.write_text(f"age,color,label\n{rows}\n")
    t = load_csv(str(p), SCHEMA)
    out = p.parent / "y.csv"
    write_csv(t, str(out))
    assert load_csv(str(out), SCHEMA) == t


def q(cell: str) -> str:
    if any(ch in cell for ch in ',"\n'):
        return '"' + cell.replace('"', '""') + '"'
    return cell
