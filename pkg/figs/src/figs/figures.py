"""The named figure compositions over a CSV bundle directory."""

from __future__ import annotations

from pathlib import Path

from .spec import FigureError, FigureSpec, Series

X_LABEL = "Day"


def _col(in_dir: Path, stem: str, column: str, label: str) -> Series:
    return Series(csv_path=in_dir / f"{stem}.csv", column=column, label=label)


def _epidemic(in_dir: Path) -> tuple[Series, ...]:
    return (
        _col(in_dir, "no_testing", "mean_infected", "No testing"),
        _col(in_dir, "complete", "mean_infected", "Complete"),
        _col(in_dir, "rnd_mean", "mean_infected", "Rnd. Grp. mean"),
    )


def _tests_needed(in_dir: Path) -> tuple[Series, ...]:
    return (
        _col(in_dir, "complete", "mean_tests", "Complete"),
        _col(in_dir, "rnd_mean", "mean_tests", "Rnd. Grp. mean"),
        _col(in_dir, "cca", "mean_tests", "CCA"),
        _col(in_dir, "rnd_max", "mean_tests", "Rnd. Grp. max."),
        _col(in_dir, "complete", "entropy_lb", "Lower bound"),
    )


def _budget_spend(in_dir: Path) -> tuple[Series, ...]:
    return (
        _col(in_dir, "complete", "mean_tests", "Complete"),
        _col(in_dir, "rnd_mean", "mean_tests", "Rnd. Grp. mean"),
        _col(in_dir, "complete", "entropy_lb", "Lower bound"),
    )


def _comparator(in_dir: Path) -> tuple[Series, ...]:
    return (
        _col(in_dir, "no_testing", "mean_infected", "Discrete time"),
        _col(in_dir, "gillespie", "mean_infected", "Continuous time"),
    )


_BUILDERS = {
    "fig1": (_epidemic, "Infected individuals"),
    "fig4a": (_tests_needed, "Tests per day"),
    "fig4b": (_tests_needed, "Tests per day"),
    "fig6a": (_budget_spend, "Tests per day"),
    "fig6b": (_budget_spend, "Tests per day"),
    "fig7": (_comparator, "Infected individuals"),
}


def figure_names() -> list[str]:
    return sorted(_BUILDERS)


def make_spec(name: str, in_dir: str | Path, out_path: str | Path) -> FigureSpec:
    """Figure specification for one named figure over one bundle directory."""
    try:
        builder, y_label = _BUILDERS[name]
    except KeyError:
        raise FigureError(
            f"unknown figure {name!r} (have {', '.join(figure_names())})"
        ) from None
    return FigureSpec(
        series=builder(Path(in_dir)),
        x_label=X_LABEL,
        y_label=y_label,
        out_path=Path(out_path),
    )
