from collections.abc import Callable
from pathlib import Path
from typing import Any

import pytest

from dimer_forge.utils.helpers import dumps_json


@pytest.fixture
def write_input(tmp_path: Path) -> Callable[[str, Any], Path]:
    def write(name: str, payload: Any) -> Path:
        path = tmp_path / name
        if isinstance(payload, str):
            path.write_text(payload, encoding="utf-8")
        else:
            path.write_text(dumps_json(payload), encoding="utf-8")
        return path

    return write
