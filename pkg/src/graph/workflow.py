"""LangGraph workflow construction."""

from functools import partial
from typing import Literal

from langgraph.graph import END, StateGraph

from src.graph.nodes import (
    LocalizationContext,
    estimate_node,
    evaluate_node,
    fail_node,
    metrics_node,
    observe_node,
    route_node,
    sample_node,
)
from src.graph.state import LocalizationState
from src.mcl.hypotheses import Modality
from src.simworld.records import DatasetRecord
from src.utils.logger import logger


def route_after_routing(state: LocalizationState) -> Literal["sample", "fail"]:
    """
    Continue to sampling unless no modality is usable.

    Args:
        state: Current state

    Returns:
        Next node name
    """
    return "sample" if state.get("next_action") == "sample" else "fail"


def create_workflow(context: LocalizationContext):
    """
    Create the per-record localization workflow.

    Args:
        context: Maps, evaluator and run parameters

    Returns:
        Compiled workflow
    """
    workflow = StateGraph(LocalizationState)

    workflow.add_node("observe", partial(observe_node, ctx=context))
    workflow.add_node("route", route_node)
    workflow.add_node("fail", fail_node)
    workflow.add_node("sample", partial(sample_node, ctx=context))
    workflow.add_node("evaluate", partial(evaluate_node, ctx=context))
    workflow.add_node("estimate", partial(estimate_node, ctx=context))
    workflow.add_node("metrics", metrics_node)

    workflow.set_entry_point("observe")
    workflow.add_edge("observe", "route")
    workflow.add_conditional_edges(
        "route",
        route_after_routing,
        {
            "sample": "sample",
            "fail": "fail",
        },
    )
    workflow.add_edge("sample", "evaluate")
    workflow.add_edge("evaluate", "estimate")
    workflow.add_edge("estimate", "metrics")
    workflow.add_edge("metrics", END)
    workflow.add_edge("fail", END)

    return workflow.compile()


class LocalizationWorkflow:
    """Localization workflow wrapper."""

    def __init__(self, context: LocalizationContext):
        self.context = context
        self.workflow = create_workflow(context)
        logger.debug("Localization workflow created")

    def run(self, record: DatasetRecord, record_index: int, modality: Modality) -> LocalizationState:
        """
        Localize one record.

        Args:
            record: Dataset record
            record_index: Position in the dataset (drives the hypothesis seed)
            modality: Requested modality

        Returns:
            Final state with ``estimate``, ``hypotheses`` and ``metric``
        """
        initial_state: LocalizationState = {
            "record": record,
            "record_index": record_index,
            "requested_modality": Modality(modality).value,
            "degraded": False,
            "next_action": "",
        }
        return self.workflow.invoke(initial_state)
