"""Built-in project fixtures.

Three shipped-product scenarios (A, B, C) with their observed defect counts:
A and B were safety certified, C's certification was deferred; B had not been
fielded a full year when its record was taken, so its field count is absent.
Size inputs and answer distributions are fixture choices consistent with the
recorded project characteristics, not measurements.
"""

from __future__ import annotations

from .defect import Answer, ProjectScenario
from .network import USAGE_LEVELS


def _scenario(answers: dict[str, dict[str, float]], complexity: dict[str, float],
              kloc: float, hours: float, usage: dict[str, float],
              certification: str) -> ProjectScenario:
    return ProjectScenario(
        answers=tuple(Answer.of(dim, dist) for dim, dist in answers.items()),
        complexity_answer=Answer.of("new_functionality_complexity", complexity),
        kloc=kloc,
        hours_booked=hours,
        usage_level=Answer.of("usage_level", usage, levels=USAGE_LEVELS),
        horizon_months=12,
        certification=certification,
    )


def scenario_a() -> ProjectScenario:
    """Application-level redesign of an existing product; certified."""
    return _scenario(
        answers={
            "testing_quality": {"High": 0.8, "Medium": 0.2},
            "review_quality": {"High": 1.0},
            "verification_type": {"Medium": 0.6, "High": 0.4},
            "team_experience": {"High": 0.7, "Medium": 0.3},
            "project_management": {"High": 1.0},
            "process_maturity": {"High": 1.0},
            "tool_quality": {"Medium": 0.5, "High": 0.5},
            "requirements_stability": {"Medium": 1.0},
            "domain_novelty": {"Low": 0.7, "Medium": 0.3},
        },
        complexity={"Medium": 1.0},
        kloc=45.0,
        hours=60000.0,
        usage={"High": 1.0},
        certification="yes",
    )


def scenario_b() -> ProjectScenario:
    """Small, very focused project against a published standard; certified."""
    return _scenario(
        answers={
            "testing_quality": {"High": 0.6, "VeryHigh": 0.4},
            "review_quality": {"High": 1.0},
            "verification_type": {"High": 0.7, "Medium": 0.3},
            "team_experience": {"VeryHigh": 0.8, "High": 0.2},
            "project_management": {"Medium": 0.6, "High": 0.4},
            "process_maturity": {"High": 1.0},
            "tool_quality": {"Medium": 1.0},
            "requirements_stability": {"VeryHigh": 1.0},
            "domain_novelty": {"Low": 1.0},
        },
        complexity={"Low": 0.7, "Medium": 0.3},
        kloc=8.0,
        hours=9000.0,
        usage={"Medium": 1.0},
        certification="yes",
    )


def scenario_c() -> ProjectScenario:
    """Large development at processor-hardware level in a new area; certification deferred."""
    return _scenario(
        answers={
            "testing_quality": {"Medium": 0.7, "Low": 0.3},
            "review_quality": {"Medium": 1.0},
            "verification_type": {"Medium": 0.5, "Low": 0.5},
            "team_experience": {"Medium": 0.6, "Low": 0.4},
            "project_management": {"Medium": 1.0},
            "process_maturity": {"High": 0.6, "Medium": 0.4},
            "tool_quality": {"Medium": 0.7, "Low": 0.3},
            "requirements_stability": {"Low": 0.6, "Medium": 0.4},
            "domain_novelty": {"VeryHigh": 0.7, "High": 0.3},
        },
        complexity={"High": 0.6, "VeryHigh": 0.4},
        kloc=130.0,
        hours=150000.0,
        usage={"High": 1.0},
        certification="planned",
    )


#: (project, scenario factory, found in verification, field defects first year)
PROJECT_RECORDS = (
    ("A", scenario_a, 76, 8),
    ("B", scenario_b, 10, None),
    ("C", scenario_c, 195, 24),
)


def neutral_scenario(kloc: float = 50.0, hours: float = 20000.0,
                     usage: str = "Medium") -> ProjectScenario:
    """All answers point-Medium; the least-information starting point."""
    from .defect import SCENARIO_DIMENSIONS

    return ProjectScenario(
        answers=tuple(Answer.point(dim, "Medium") for dim in SCENARIO_DIMENSIONS),
        complexity_answer=Answer.point("new_functionality_complexity", "Medium"),
        kloc=kloc,
        hours_booked=hours,
        usage_level=Answer.point("usage_level", usage, levels=USAGE_LEVELS),
    )
