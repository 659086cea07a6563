"""
Configuration dependencies module.
This module provides dependencies that turn HTTP request bodies into
validated run configurations.
"""
import json
from typing import Any, Dict

from fastapi import Body, HTTPException, status
from pydantic import ValidationError

from app.api.schemas.run import RunConfig

def get_run_config(command: str, body: Dict[str, Any] = Body(default={})) -> RunConfig:
    """
    Dependency to build the run configuration for a command.

    Args:
        command (str): The command from the path.
        body (Dict[str, Any]): The remaining configuration keys.

    Returns:
        RunConfig: The validated configuration.

    Raises:
        HTTPException: If the configuration does not validate.
    """
    try:
        return RunConfig.model_validate({**body, "command": command})
    except ValidationError as exc:
        raise HTTPException(
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
            detail=json.loads(exc.json(include_url=False)),
        )
