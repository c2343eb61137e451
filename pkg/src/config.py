"""Environment settings for the footprint localizer."""

import os
from pathlib import Path

from dotenv import load_dotenv
from pydantic import BaseModel, Field

# Load environment variables from .env file
load_dotenv()

# Base directory
BASE_DIR = Path(__file__).parent.parent


class Config(BaseModel):
    """Process-wide settings read from the environment."""

    # Logging
    log_level: str = Field(default_factory=lambda: os.getenv("LOG_LEVEL", "INFO"))
    log_file: str = Field(default_factory=lambda: os.getenv("LOG_FILE", ""))

    # Hypothesis evaluation
    workers: int = Field(default_factory=lambda: int(os.getenv("LOCALIZER_WORKERS", "1")))
    chunk_size: int = Field(default_factory=lambda: int(os.getenv("LOCALIZER_CHUNK_SIZE", "4096")))

    # Vision-language model endpoint
    vlm_base_url: str = Field(
        default_factory=lambda: os.getenv("VLM_BASE_URL", "https://api.openai.com/v1")
    )
    vlm_model: str = Field(default_factory=lambda: os.getenv("VLM_MODEL", "gpt-4.1"))
    vlm_api_key_env: str = Field(default_factory=lambda: os.getenv("VLM_API_KEY_ENV", "OPENAI_API_KEY"))
    vlm_timeout: float = Field(default_factory=lambda: float(os.getenv("VLM_TIMEOUT", "60")))
    vlm_max_retries: int = Field(default_factory=lambda: int(os.getenv("VLM_MAX_RETRIES", "3")))

    # Data directories
    data_dir: str = Field(default_factory=lambda: os.getenv("DATA_DIR", str(BASE_DIR / "data")))
    default_run_config: str = Field(default=str(BASE_DIR / "config" / "default.yaml"))

    def validate_runtime(self) -> bool:
        """Validate numeric settings."""
        if self.workers < 1:
            raise ValueError("LOCALIZER_WORKERS must be >= 1")
        if self.chunk_size < 1:
            raise ValueError("LOCALIZER_CHUNK_SIZE must be >= 1")
        return True

    def ensure_directories(self) -> None:
        """Ensure all required directories exist."""
        directories = [self.data_dir]
        if self.log_file:
            directories.append(os.path.dirname(self.log_file) or ".")
        for directory in directories:
            Path(directory).mkdir(parents=True, exist_ok=True)


# Global configuration instance
config = Config()
