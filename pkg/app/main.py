"""
Main application module.
This module builds the Sublevel Verify FastAPI application. It serves the
same verification runs as `python -m app`: `GET /api/runs/` lists the
commands, `GET /api/runs/schema` returns the RunConfig JSON schema and
`POST /api/runs/{command}` validates a JSON body into a RunConfig, runs it
and returns the RunReport, writing report.json and report.csv when the body
sets `out`. Logging is configured on startup from SUBLEVEL_LOG_LEVEL.
"""
import os
from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from dotenv import load_dotenv

from app.api.routes import runs
from app.api.schemas.run import COMMANDS
from app.api.utils.settings import configure_logging

# Load environment variables
load_dotenv()

# Create FastAPI app
app = FastAPI(
    title="Sublevel Verify",
    description="Numerical verification of uniformly balancing sublevel inequalities",
    version="1.0.0"
)

# Configure CORS
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Include routers
app.include_router(runs.router, prefix="/api")

@app.on_event("startup")
async def startup_event():
    """
    Configure logging once before the first run is served.
    """
    configure_logging()

@app.get("/")
async def root():
    """
    Root endpoint.

    Returns:
        dict: A status message and the commands accepted by POST /api/runs/{command}.
    """
    return {"message": "Sublevel Verify is running", "commands": COMMANDS}

# Main entry point
if __name__ == "__main__":
    import uvicorn

    host = os.getenv("HOST", "0.0.0.0")
    port = int(os.getenv("PORT", "8000"))
    debug = os.getenv("DEBUG", "False").lower() == "true"

    uvicorn.run("app.main:app", host=host, port=port, reload=debug)
