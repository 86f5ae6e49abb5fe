import pathlib

from dtexplain import DecisionTree, parse_tree_file

FIXTURE_DIR = pathlib.Path(__file__).parent / "fixtures"

FIXTURE_NAMES = (
    "or_tree",
    "or_of_ands",
    "selector",
    "cross_circle",
    "play_tennis",
    "restaurant",
    "articles",
    "repeat_feature",
    "constant",
)


def fixture_path(name: str) -> str:
    return str(FIXTURE_DIR / f"{name}.json")


def load_tree(name: str) -> DecisionTree:
    return parse_tree_file(fixture_path(name))


def literal_names(tree, literals) -> frozenset[str]:
    """Render a literal collection as a set of 'feature=value' strings."""
    return frozenset(lit.render(tree.space) for lit in literals)
