"""Conversational network-medicine workbench.

Knowledge-graph querying, disease-module expansion, drug prioritization,
functional-coherence validation, literature grounding, and a step-budgeted
multi-agent orchestrator — with every language-model interaction behind a
pluggable provider so full workflows replay offline.
"""

__version__ = "0.1.0"
