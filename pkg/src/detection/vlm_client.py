"""Vision-language model detector over an OpenAI-compatible chat endpoint."""

import base64
import mimetypes
import os
import re
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import FrozenSet, List, Optional, Sequence, Tuple, Union

import requests
from pydantic import BaseModel, Field
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt, wait_exponential

from src.config import config
from src.detection.observation import LabelObservation, ObservationSource
from src.detection.prompts import format_detection_prompt
from src.maps.footprint import LabeledFootprintMap
from src.utils.errors import DetectionUnavailableError, InvalidArgumentError
from src.utils.logger import logger

_SPLIT = re.compile(r"[\n,;]+")
_BULLET = re.compile(r"^\s*(?:[-*•]+|\d+[.)])\s*")
_EMPTY_REPLIES = {"", "none", "nothing", "no objects", "n/a"}


class VlmEndpointConfig(BaseModel):
    """Where and how to reach the chat-completion endpoint."""

    base_url: str = Field(default_factory=lambda: config.vlm_base_url)
    model_name: str = Field(default_factory=lambda: config.vlm_model)
    api_key_env_var: str = Field(default_factory=lambda: config.vlm_api_key_env)
    timeout: float = Field(default_factory=lambda: config.vlm_timeout, gt=0)
    max_retries: int = Field(default_factory=lambda: config.vlm_max_retries, ge=1)


def normalize_label(text: str) -> str:
    """Case-fold and collapse whitespace."""
    return " ".join(text.split()).casefold()


def parse_vlm_reply(reply: str, footprint_map: LabeledFootprintMap) -> Tuple[FrozenSet[str], FrozenSet[str]]:
    """
    Leniently parse a free-text reply into map labels.

    Items are split on newlines, commas and semicolons, stripped of list
    bullets and quotes, then matched to map labels case-insensitively.

    Args:
        reply: Model reply text
        footprint_map: Map whose labels are recognized

    Returns:
        (on_map, off_map) label sets; on-map items use the map's spelling
    """
    known = {normalize_label(label): label for label in footprint_map.labels}
    if normalize_label(reply).strip(".") in _EMPTY_REPLIES:
        return frozenset(), frozenset()

    on_map, off_map = set(), set()
    for item in _SPLIT.split(reply):
        item = _BULLET.sub("", item).strip().strip("\"'`.").strip()
        key = normalize_label(item)
        if key in _EMPTY_REPLIES:
            continue
        if key in known:
            on_map.add(known[key])
        else:
            off_map.add(" ".join(item.split()))
    return frozenset(on_map), frozenset(off_map)


class VlmClient:
    """Client for a chat-completion endpoint that accepts image content."""

    def __init__(self, endpoint: Optional[VlmEndpointConfig] = None, session: Optional[requests.Session] = None):
        """
        Initialize VLM client.

        Args:
            endpoint: Endpoint settings (defaults from the environment)
            session: HTTP session, replaceable in tests
        """
        self.endpoint = endpoint or VlmEndpointConfig()
        self.session = session or requests.Session()
        logger.info(f"Initialized VLM client for model: {self.endpoint.model_name}")

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json"}
        api_key = os.getenv(self.endpoint.api_key_env_var)
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        else:
            logger.warning(f"{self.endpoint.api_key_env_var} is not set; calling endpoint without a key")
        return headers

    @staticmethod
    def _image_url(image_path: Path) -> str:
        mime = mimetypes.guess_type(image_path.name)[0] or "image/jpeg"
        payload = base64.b64encode(image_path.read_bytes()).decode("ascii")
        return f"data:{mime};base64,{payload}"

    def _post(self, body: dict) -> dict:
        url = f"{self.endpoint.base_url.rstrip('/')}/chat/completions"
        response = self.session.post(url, json=body, headers=self._headers(), timeout=self.endpoint.timeout)
        response.raise_for_status()
        return response.json()

    def describe(self, image_path: Union[str, Path], prompt: str) -> Optional[str]:
        """
        Send one image with the prompt.

        Returns:
            Reply text, or None when the response carries no message text

        Raises:
            DetectionUnavailableError: transport failure after all retries
        """
        image_path = Path(image_path)
        if not image_path.is_file():
            raise InvalidArgumentError(f"Camera image not found: {image_path}")

        body = {
            "model": self.endpoint.model_name,
            "temperature": 0,
            "messages": [{
                "role": "user",
                "content": [
                    {"type": "text", "text": prompt},
                    {"type": "image_url", "image_url": {"url": self._image_url(image_path)}},
                ],
            }],
        }
        retrying = Retrying(
            stop=stop_after_attempt(self.endpoint.max_retries),
            wait=wait_exponential(multiplier=1, min=2, max=10),
            retry=retry_if_exception_type(requests.RequestException),
            reraise=True,
        )
        try:
            data = retrying(self._post, body)
        except requests.RequestException as e:
            logger.error(f"VLM request failed after {self.endpoint.max_retries} attempts: {e}")
            raise DetectionUnavailableError(
                f"VLM endpoint unavailable: {e}",
                details={"image": str(image_path), "attempts": self.endpoint.max_retries},
            ) from e

        try:
            content = data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError):
            return None
        return content if isinstance(content, str) else None


def vlm_detect(
    images: Sequence[Union[str, Path]],
    footprint_map: LabeledFootprintMap,
    endpoint: Optional[VlmEndpointConfig] = None,
    client: Optional[VlmClient] = None,
) -> LabelObservation:
    """
    Ask the VLM which map labels each camera image shows.

    Args:
        images: One image per camera, in rig order
        footprint_map: Map providing the object list
        endpoint: Endpoint settings
        client: Preconfigured client

    Returns:
        Observation with ``source = vlm``; unparseable replies give empty sets
    """
    client = client or VlmClient(endpoint)
    prompt = format_detection_prompt(footprint_map.labels)

    def detect_one(path) -> Tuple[FrozenSet[str], FrozenSet[str]]:
        reply = client.describe(path, prompt)
        if reply is None:
            logger.warning(f"Unparseable VLM reply for {path}; treating camera as seeing nothing")
            return frozenset(), frozenset()
        on_map, off_map = parse_vlm_reply(reply, footprint_map)
        if off_map:
            logger.info(f"{Path(path).name}: labels not on the map ignored: {sorted(off_map)}")
        return on_map, off_map

    if not images:
        return LabelObservation((), ObservationSource.VLM)
    # map() keeps camera order regardless of completion order
    with ThreadPoolExecutor(max_workers=len(images)) as pool:
        results: List[Tuple[FrozenSet[str], FrozenSet[str]]] = list(pool.map(detect_one, images))

    return LabelObservation(
        tuple(on for on, _ in results),
        ObservationSource.VLM,
        tuple(off for _, off in results),
    )
