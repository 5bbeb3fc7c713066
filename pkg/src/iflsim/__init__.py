"""iflsim: a deterministic simulator of indirect file leaks.

Sandboxed apps that open files, run commands, or serve files on behalf of
others can be turned into confused deputies that hand out their own private
data. This package models the device (vfs, net, world), the three deputy
families (webdeputy, cmddeputy, serverdeputy), the origin rules that gate
cross-document access (origin), and a scenario harness with bundled presets,
a mitigation matrix, and platform-profile differentials (harness, catalog).
"""

from .harness import (
    ANDROID_LIKE,
    IOS_LIKE,
    MITIGATIONS,
    PROFILES,
    AdversaryModel,
    AttackReport,
    MatrixReport,
    PlatformProfile,
    Scenario,
    ScenarioInvalid,
    apply_mitigation,
    compare_profiles,
    run_matrix,
    run_scenario,
)
from .world import World

__all__ = [
    "ANDROID_LIKE",
    "IOS_LIKE",
    "MITIGATIONS",
    "PROFILES",
    "AdversaryModel",
    "AttackReport",
    "MatrixReport",
    "PlatformProfile",
    "Scenario",
    "ScenarioInvalid",
    "World",
    "apply_mitigation",
    "compare_profiles",
    "run_matrix",
    "run_scenario",
]

__version__ = "0.1.0"
