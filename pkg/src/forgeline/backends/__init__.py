"""Pluggable model backends: wire protocol, HTTP clients, deterministic mocks."""

from forgeline.backends.client import (
    CLIENT_CLASSES,
    HttpAnalyzer,
    HttpCaptioner,
    HttpEmbedder,
    HttpGenerator,
    HttpInpainter,
    HttpReviser,
    HttpScorer,
)
from forgeline.backends.conformance import ProbeResult, probe_suite
from forgeline.backends.mocks import (
    AreaScorer,
    ConstantCaptioner,
    ConstantFillInpainter,
    ConstantScorer,
    EchoReviser,
    HashEmbedder,
    IdentityInpainter,
    MockSuiteConfig,
    OracleAnalyzer,
    PerfectInpainter,
    PromptHashGenerator,
    ScriptedAnalyzer,
    build_mock_suite,
    image_digest,
    make_mock,
)
from forgeline.backends.protocol import (
    DECISION_THRESHOLD,
    ENDPOINT_PATHS,
    ROLES,
    AnalyzerReport,
    ReportRegion,
    decode_image_png,
    encode_image_png,
    load_schema,
    mask_from_wire,
    mask_to_wire,
    report_label,
    wire_roundtrip,
)
from forgeline.backends.server import MockBackendServer
from forgeline.backends.suite import BackendSuite, EndpointConfig, load_backends

__all__ = [
    "AnalyzerReport",
    "AreaScorer",
    "BackendSuite",
    "CLIENT_CLASSES",
    "ConstantCaptioner",
    "ConstantFillInpainter",
    "ConstantScorer",
    "DECISION_THRESHOLD",
    "ENDPOINT_PATHS",
    "EchoReviser",
    "EndpointConfig",
    "HashEmbedder",
    "HttpAnalyzer",
    "HttpCaptioner",
    "HttpEmbedder",
    "HttpGenerator",
    "HttpInpainter",
    "HttpReviser",
    "HttpScorer",
    "IdentityInpainter",
    "MockBackendServer",
    "MockSuiteConfig",
    "OracleAnalyzer",
    "PerfectInpainter",
    "ProbeResult",
    "PromptHashGenerator",
    "ROLES",
    "ReportRegion",
    "ScriptedAnalyzer",
    "build_mock_suite",
    "decode_image_png",
    "encode_image_png",
    "image_digest",
    "load_backends",
    "load_schema",
    "make_mock",
    "mask_from_wire",
    "mask_to_wire",
    "probe_suite",
    "report_label",
    "wire_roundtrip",
]
