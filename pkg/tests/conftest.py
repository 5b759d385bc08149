import pytest

from helpers import edge, graph_of, node


@pytest.fixture
def one_edge_graph():
    """Entry a -> crown c with p=0.5, R_c=0.5: exposure 0.25 by hand."""
    return graph_of(
        [
            node("a", r=0.0, domains={"tls"}, entry=True),
            node("c", r=0.5, domains={"tls"}, impact=0.95, w=1.0),
        ],
        [edge("a", "c", 0.5)],
    )


@pytest.fixture
def chain_graph():
    """a -> b -> c, p=1, R=0, w=1; the all-walks score collapses to alpha^2."""
    return graph_of(
        [
            node("a", w=1.0, domains={"tls"}, entry=True),
            node("b", w=1.0, domains={"tls"}),
            node("c", w=1.0, domains={"tls"}, impact=1.0),
        ],
        [edge("a", "b", 1.0), edge("b", "c", 1.0)],
    )


@pytest.fixture
def diamond_graph():
    """Two node-disjoint interior routes a -> {b,c} -> d."""
    return graph_of(
        [
            node("a", r=0.0, domains={"tls"}, entry=True),
            node("b", r=0.2, domains={"vpn"}),
            node("c", r=0.4, domains={"pki"}),
            node("d", r=0.1, domains={"tls", "pki"}, impact=0.95, w=0.8),
        ],
        [
            edge("a", "b", 0.9),
            edge("a", "c", 0.8),
            edge("b", "d", 0.7),
            edge("c", "d", 0.6),
        ],
    )
