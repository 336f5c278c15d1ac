import typing
from dataclasses import dataclass, field

import pandera.polars as pa
import polars as pl
from pandera.typing.polars import DataFrame, Series

ROW_COLUMN = "row"


class CheckLogSchema(pa.DataFrameModel):
    row: Series[pl.Int64] = pa.Field(ge=1)
    landing_id: Series[pl.Int64] = pa.Field(nullable=True)
    name: Series[pl.String] = pa.Field()
    explanation: Series[pl.String] = pa.Field()

    class Config:
        strict = True
        coerce = True


@dataclass(frozen=True)
class CheckResult:
    """Rows that make a landing file unusable (errors) and rows that only look suspicious (flags)."""

    error_log: DataFrame[CheckLogSchema]
    flag_log: DataFrame[CheckLogSchema]

    @property
    def first_error(self) -> dict | None:
        if len(self.error_log) == 0:
            return None
        return self.error_log.sort(ROW_COLUMN).row(0, named=True)


def _log_rows(df: pl.DataFrame, expr: pl.Expr, name: str, explanation: str) -> pl.DataFrame:
    return df.filter(expr).select(
        pl.col(ROW_COLUMN),
        pl.col("landing_id"),
        pl.lit(name).alias("name"),
        pl.lit(explanation).alias("explanation"),
    )


@dataclass(frozen=True)
class RecordCheck:
    """A named boolean expression over the record frame; rows where it holds are logged."""

    name: str
    expr: pl.Expr
    explanation: str = ""

    def apply(self, df: pl.DataFrame) -> pl.DataFrame:
        return _log_rows(df, self.expr, self.name, self.explanation)


class ErrorCheck(RecordCheck):
    """Hits make the file invalid."""


class FlagCheck(RecordCheck):
    """Hits are logged without rejecting the file."""


@dataclass(frozen=True)
class CheckList[C: RecordCheck]:
    """Ordered checks; `+` concatenates lists of the same kind."""

    checks: list[C] = field(default_factory=list)

    def __add__(self, other: typing.Self) -> typing.Self:
        if type(other) is not type(self):
            return NotImplemented
        return type(self)(self.checks + other.checks)

    def __iter__(self) -> typing.Iterator[C]:
        return iter(self.checks)


class ErrorList(CheckList[ErrorCheck]):
    pass


class FlagList(CheckList[FlagCheck]):
    pass
