import logging
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from app.config.settings import ServiceConfig, load_settings
from app.exceptions import MalformedDate, UnknownSubject
from app.routers import mementos, resources, timegate, timemaps
from app.routers.common import ServiceContext
from app.services.archive_service import Archive, open_archive
from app.utils.http_date import Clock, utc_now

logger = logging.getLogger(__name__)

SERVICE_NAME = "Memento Linked Data Archive"
VERSION = "1.0.0"


def create_app(
    settings: Optional[ServiceConfig] = None,
    archive: Optional[Archive] = None,
    clock: Optional[Clock] = None,
) -> FastAPI:
    """Build the service. Without an archive, the configured archive path is opened at startup."""
    settings = settings or load_settings()
    clock = clock or utc_now

    app = FastAPI(
        title=f"{SERVICE_NAME} API",
        description="Datetime content negotiation (TimeGates, Mementos, TimeMaps) over versioned linked data",
        version=VERSION,
        docs_url="/docs",
        redoc_url="/redoc",
    )
    app.state.settings = settings
    app.state.memento = ServiceContext(settings, archive, clock) if archive is not None else None

    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["GET", "HEAD"],
        allow_headers=["Accept", "Accept-Datetime", "Negotiate"],
        expose_headers=["Link", "Location", "Content-Datetime", "Vary"],
    )

    app.include_router(resources.router)
    app.include_router(timegate.router)
    app.include_router(mementos.router)
    app.include_router(timemaps.router)

    @app.get("/health")
    def health_check():
        """Health check endpoint"""
        context = app.state.memento
        return {
            "status": "healthy" if context is not None else "starting",
            "service": SERVICE_NAME,
            "version": VERSION,
            "subjects": len(context.archive.subjects()) if context is not None else 0,
        }

    @app.get("/")
    def root():
        """Root endpoint with API information"""
        return {
            "message": f"{SERVICE_NAME} API",
            "version": VERSION,
            "base_url": settings.base_url,
            "docs": "/docs",
            "endpoints": {
                "original": "GET|HEAD /resource/{name} - Current representation, Link to its TimeGate",
                "timegate": "GET|HEAD /timegate/{uri} - 302 to the memento for Accept-Datetime",
                "memento": "GET|HEAD /memento/{YYYYMMDD}/{uri} - Archived representation with Content-Datetime",
                "timemap": "GET|HEAD /timemap/rdf/{uri} - RDF/XML TimeMap",
                "timebundle": "GET|HEAD /timebundle/{uri} - 303 to the TimeMap",
            },
        }

    @app.exception_handler(UnknownSubject)
    async def unknown_subject(request: Request, exc: UnknownSubject):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.exception_handler(MalformedDate)
    async def malformed_date(request: Request, exc: MalformedDate):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(500)
    async def internal_server_error(request: Request, exc: Exception):
        logger.error(f"Unhandled error on {request.method} {request.url.path}: {exc}")
        return JSONResponse(status_code=500, content={"detail": f"Internal server error: {exc}"})

    @app.on_event("startup")
    async def startup_event():
        if app.state.memento is None:
            logger.info(f"Opening archive {settings.archive_path}")
            app.state.memento = ServiceContext(settings, open_archive(settings.archive_path, settings.base_url), clock)
        logger.info(f"{SERVICE_NAME} ready at {settings.base_url}")

    @app.on_event("shutdown")
    async def shutdown_event():
        logger.info(f"Shutting down {SERVICE_NAME}")

    return app


# ASGI entry point: `uvicorn app.main:app`
app = create_app()
