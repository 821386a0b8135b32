"""Python bindings for the co-exploration agent."""

from ._coexplorer import (  # noqa: F401
    AgentKind,
    Config,
    ConfigError,
    DegenerateTrajectory,
    DimensionMismatch,
    MalformedMessage,
    RunReport,
    Session,
    TrainingHalted,
    UnknownHistoryId,
    WrongMode,
    exploration_bonus,
    project_pca,
    project_trajectory_pca,
    roundtrip_json,
    run_episode,
    zone_expand_count,
)
