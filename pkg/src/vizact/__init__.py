"""vizact: a declarative interaction-grammar compiler and deterministic
headless runtime for interactive data visualizations."""

from .model import (
    Diagnostic,
    Document,
    OpError,
    Predicate,
    parse_document,
    serialize_document,
    validate_document,
)
from .scene import (
    ChannelSet,
    Scale,
    SceneGraph,
    VisualObject,
    apply_encodings,
    build_scene_graph,
    query_objects,
    update_object_data,
)
from .interaction import (
    Camera,
    EvaluationScale,
    Event,
    HitObject,
    StateVariable,
    TargetEvaluator,
    apply_evaluation_scale,
    camera_pan,
    camera_zoom,
    distance_targets,
    eval_predicate,
    evaluate_targets,
    hit_test,
    order_targets,
)
from .registry import (
    Registry,
    default_registry,
    intents_of_technique,
    load_registry,
    signature_of,
    techniques_for_user_intent,
)
from .compiler import (
    ClassificationReport,
    CompiledInteraction,
    ComponentGraph,
    check_signature,
    classify_interaction,
    compile_document,
    elaborate_intent,
    explain_document,
    explain_markdown,
    instantiate_technique,
)
from .runtime import (
    EventScript,
    RuntimeState,
    Trace,
    dispatch_event,
    initial_state,
    render_svg,
    run_script,
)

__version__ = "0.1.0"
