from typing import Optional

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """greenseq runtime settings.

    All settings can be overridden via environment variables or a .env file.
    Environment variables use the GREENSEQ_ prefix (e.g., GREENSEQ_SEARCH_NODE_LIMIT=50000).

    Budgets:
        search_node_limit    seeds a shortest-MGS search or MGS enumeration may visit
        enumerate_node_limit seeds an exchange-graph enumeration may hold
        class_limit          quivers a mutation-class enumeration may hold
    """

    log_level: str = "INFO"
    json_logs: bool = False

    search_node_limit: int = 200_000
    search_depth: int = 12  # used by `greenseq search` when --depth is omitted
    enumerate_node_limit: int = 5_000
    class_limit: int = 20_000
    affine_search_depth: int = 8  # mutation distance explored by affine_parameters

    # Certificate cache; disabled unless a directory is configured
    cache_dir: Optional[str] = None
    cache_expire_seconds: Optional[int] = None

    check_duality: bool = True

    class Config:
        env_prefix = "GREENSEQ_"
        env_file = ".env"
        env_file_encoding = "utf-8"
        extra = "ignore"


settings = Settings()
