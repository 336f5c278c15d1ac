import polars as pl

from .models import ROW_COLUMN, CheckLogSchema, CheckResult, ErrorList, FlagList


def run_checks(df: pl.DataFrame, errors: ErrorList, flags: FlagList) -> CheckResult:
    """Run record checks over a typed landing frame carrying a `row` column."""
    ordered = df.sort(["landing_id", "t", ROW_COLUMN])

    error_logs: list[pl.DataFrame] = []
    for e_check in errors:
        log = e_check.apply(ordered)
        if len(log) > 0:
            error_logs.append(log)

    flag_logs: list[pl.DataFrame] = []
    for fl_check in flags:
        log = fl_check.apply(ordered)
        if len(log) > 0:
            flag_logs.append(log)

    error_df = pl.concat(error_logs).sort(ROW_COLUMN) if error_logs else CheckLogSchema.empty()
    flag_df = pl.concat(flag_logs).sort(ROW_COLUMN) if flag_logs else CheckLogSchema.empty()

    return CheckResult(
        error_log=CheckLogSchema.validate(error_df),
        flag_log=CheckLogSchema.validate(flag_df),
    )
