from __future__ import annotations

import typing

import pandera.polars as pl_pa
import polars as pl

PolarsDtype = pl.DataType | type[pl.DataType]


def dtypes_from_schema(schema: type[pl_pa.DataFrameModel]) -> dict[str, PolarsDtype]:
    """Ordered {column: polars dtype} of a pandera model, as resolved by pandera's polars engine."""
    return {name: column.dtype.type for name, column in schema.to_schema().columns.items()}


def empty_frame(schema: type[pl_pa.DataFrameModel]) -> pl.DataFrame:
    return pl.DataFrame(schema=dtypes_from_schema(schema))


def cast_to_schema(df: pl.DataFrame, schema: type[pl_pa.DataFrameModel]) -> pl.DataFrame:
    """Keep the schema's columns in declaration order, cast them, and pandera-validate."""
    df = df.select([pl.col(name).cast(dtype) for name, dtype in dtypes_from_schema(schema).items()])
    return typing.cast(pl.DataFrame, schema.validate(df))


def to_canonical_strings(df: pl.DataFrame) -> pl.DataFrame:
    """
    Render every float column with the shortest decimal that round-trips to the same double.

    Nulls stay null and are written as empty fields.
    """
    float_cols = [col for col, dtype in df.schema.items() if dtype.is_float()]
    if not float_cols or df.height == 0:
        return df.with_columns([pl.col(col).cast(pl.String) for col in float_cols])
    return df.with_columns([pl.col(col).map_elements(float.__repr__, return_dtype=pl.String) for col in float_cols])
