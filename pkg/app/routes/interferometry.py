import logging

from fastapi import APIRouter, HTTPException, Query

from app.config import settings
from app.models.schemas import (
    DetectionScheme,
    HealthResponse,
    RunConfig,
    SensitivityRequest,
    SensitivityResponse,
    StateAmplitude,
    StateFamily,
    StateResponse,
    SweepRequest,
    VerificationResponse,
)
from app.services import experiments, states
from app.services.verification import run_verification

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/api/v1", tags=["Interferometry"])


@router.post("/sensitivity", response_model=SensitivityResponse)
async def compute_sensitivity(request: SensitivityRequest):
    """
    Phase sensitivity of one input state.

    Minimises delta_phi over the phase unless `phi` is given.
    """
    try:
        config = RunConfig(
            state_label=request.state,
            n_photons=request.n,
            eta=request.eta,
            m0=request.m0,
            scheme=request.scheme,
            lambda_grid=[request.transmission],
            phi=request.phi,
        )
        samples = experiments.run_sensitivity(config)
        divergent = any(sample.divergent for sample in samples)
        return SensitivityResponse(
            success=not divergent,
            message="No phase information for this state and scheme." if divergent
                    else "Sensitivity computed successfully.",
            samples=samples,
        )
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except RuntimeError as e:
        raise HTTPException(status_code=503, detail=str(e))
    except Exception:
        logger.exception("Unexpected error during sensitivity computation")
        raise HTTPException(status_code=500, detail="Internal server error.")


@router.post("/sweep", response_model=SensitivityResponse)
async def sweep_transmission(request: SweepRequest):
    """Minimum parity sensitivity for each transmission, in request order."""
    try:
        config = RunConfig(
            state_label=request.state,
            n_photons=request.n,
            eta=request.eta,
            m0=request.m0,
            scheme=DetectionScheme.PARITY,
            lambda_grid=request.transmissions,
        )
        samples = experiments.run_sensitivity(config)
        return SensitivityResponse(success=True, message=f"Swept {len(samples)} transmissions.", samples=samples)
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except RuntimeError as e:
        raise HTTPException(status_code=503, detail=str(e))
    except Exception:
        logger.exception("Unexpected error during sweep")
        raise HTTPException(status_code=500, detail="Internal server error.")


@router.get("/state", response_model=StateResponse)
async def get_state(
    state: StateFamily,
    n: int = Query(..., ge=1),
    eta: float | None = None,
    m0: float | None = None,
):
    """Amplitudes c_m of an input state."""
    try:
        built = states.build_state(state, n, eta, m0)
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except RuntimeError as e:
        raise HTTPException(status_code=503, detail=str(e))
    return StateResponse(
        state=state,
        n=n,
        amplitudes=[
            StateAmplitude(m=float(m), re=float(c.real), im=float(c.imag))
            for m, c in zip(built.m_values, built.amps)
        ],
    )


@router.get("/verify", response_model=VerificationResponse)
async def verify(max_n: int = Query(6, ge=1)):
    """Oracle-versus-closed-form checks."""
    try:
        rows = run_verification(max_n)
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    return VerificationResponse(passed=all(row.passed for row in rows), rows=rows)


@router.get("/health", response_model=HealthResponse)
async def health_check():
    """Check the health of the API."""
    return HealthResponse(
        status="healthy",
        app_name=settings.APP_NAME,
        version=settings.APP_VERSION,
        n_max=settings.N_MAX,
    )
