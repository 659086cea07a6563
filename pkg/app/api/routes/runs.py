"""
Runs routes module.
This module defines routes that execute verification runs.
"""
from typing import Any, Dict, List

from fastapi import APIRouter, Depends, HTTPException, status

from app.api.dependencies.config import get_run_config
from app.api.schemas.reports import RunReport
from app.api.schemas.run import COMMANDS, RunConfig
from app.api.services import harness
from app.api.utils.errors import OperatorHypothesisError, VerificationError
from app.api.utils.unit_of_work import write_report

router = APIRouter(prefix="/runs", tags=["Runs"])

@router.get("/", response_model=List[str])
def list_commands():
    """
    List the available commands.

    Returns:
        List[str]: The command names.
    """
    return COMMANDS

@router.get("/schema")
def run_schema() -> Dict[str, Any]:
    """
    Get the JSON schema of run configurations.

    Returns:
        Dict[str, Any]: The schema.
    """
    return RunConfig.model_json_schema()

@router.post("/{command}", response_model=RunReport)
def run_command(config: RunConfig = Depends(get_run_config)):
    """
    Run a command and return its report.

    Args:
        config (RunConfig): The validated configuration.

    Returns:
        RunReport: The report; also written to config.out when set.

    Raises:
        HTTPException: 422 when the operator hypothesis fails, 400 for other verification errors.
    """
    try:
        report = harness.run(config)
    except OperatorHypothesisError as exc:
        raise HTTPException(
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
            detail={"message": str(exc), "point": exc.point, "value": exc.value},
        )
    except VerificationError as exc:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(exc))
    if config.out:
        write_report(report, config.out)
    return report
