"""Exception types raised across the package.

Every error is a subclass of :class:`TabrebalError` so callers (and the
service layer) can catch the whole family with one except clause.
"""


class TabrebalError(Exception):
    """Base class for all package-specific errors."""


# -- table / schema / csv -----------------------------------------------------


class EmptyFileError(TabrebalError):
    """File had no header row or no data rows."""


class MalformedRowError(TabrebalError):
    """CSV row has a different number of fields than the header."""


class MissingColumnError(TabrebalError):
    """A column required by the schema is absent from the file."""


class UnknownColumnError(TabrebalError):
    """File contains a column the schema does not declare."""


class NumericParseError(TabrebalError):
    """A cell in a numeric column could not be parsed as a float."""


class UnknownCategoryError(TabrebalError):
    """A categorical value is not present in the column dictionary."""


class SchemaMismatchError(TabrebalError):
    """Two tables (or a table and a schema) disagree on columns or kinds."""


class InvalidTargetError(TabrebalError):
    """Target column is missing, non-binary, or lacks the positive label."""


class EmptyTableError(TabrebalError):
    """Operation requires at least one row."""


class EmptyColumnError(TabrebalError):
    """Operation requires a column with at least one value."""


# -- splitting / imbalance ----------------------------------------------------


class ClassTooSmallError(TabrebalError):
    """A class has fewer rows than the requested number of folds."""


class SingleClassTableError(TabrebalError):
    """Table contains only one target class."""


class FractionNotBelowCurrentError(TabrebalError):
    """Requested minority fraction is not below the current one."""


class MinorityVanishesError(TabrebalError):
    """Downsampling would leave zero minority rows."""


# -- upsampling ---------------------------------------------------------------


class NoMinorityRowsError(TabrebalError):
    """No rows of the requested class to upsample from."""


class TooFewMinorityRowsError(TabrebalError):
    """Interpolation needs at least two distinct rows of the class."""


class NoFeatureColumnsError(TabrebalError):
    """Table has neither numeric nor categorical feature columns."""


class UnknownConditionValueError(TabrebalError):
    """Conditioning value was never seen during generator training."""


# -- classifiers / metrics ----------------------------------------------------


class SingleClassLabelsError(TabrebalError):
    """Training or scoring labels contain only one class."""


class NoPositivesError(TabrebalError):
    """Ranking metric needs at least one positive label."""


class EmptySubgroupError(TabrebalError):
    """Predicate matched no rows."""


# -- benchmark ----------------------------------------------------------------


class MalformedResultsError(TabrebalError):
    """Results file is missing required columns or has unparsable cells."""
