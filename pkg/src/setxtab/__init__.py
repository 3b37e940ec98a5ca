"""setxtab: bivariate cross-tabulation of data with two set-valued columns.

The engine aggregates per element-pair heatmaps resolved by subset
cardinality, in exact rational arithmetic, with collapsing, cardinality
caps, element negation, rank/deviation transforms, drill-down, and
composite brushing; a CLI and an HTTP JSON service expose it.
"""

__version__ = "0.1.0"

from .binning import (
    AggregateResult,
    CellKey,
    ViewConfig,
    aggregate,
    apply_cap,
    cell_contributions,
)
from .brushing import (
    And,
    Brush,
    BrushOverlay,
    CardinalityAtLeast,
    CardinalityIs,
    CellMember,
    ElementPresent,
    HeatmapMember,
    ItemIdIn,
    MarginalBinMember,
    Not,
    Or,
    brushed_aggregate,
    evaluate_brush,
)
from .datagen import DriveRuleTable, OutputRule, SVariantSpec, default_drive_rules, gen_drives, gen_s
from .drilldown import (
    CombinationList,
    DetailResult,
    DetailSelection,
    detail_views,
    enumerate_combinations,
)
from .model import (
    ElementUniverse,
    SetPairTable,
    SetValue,
    negate_element,
    parse_set_value,
    reorder_elements,
)
from .oracle import brute_force_oracle
from .transforms import (
    ColorScalePreset,
    DeviationMap,
    PRESETS,
    RankMap,
    color_position,
    deviation_transform,
    expected_cell_value,
    rank_transform,
)

__all__ = [
    "AggregateResult",
    "And",
    "Brush",
    "BrushOverlay",
    "CardinalityAtLeast",
    "CardinalityIs",
    "CellKey",
    "CellMember",
    "ColorScalePreset",
    "CombinationList",
    "DetailResult",
    "DetailSelection",
    "DeviationMap",
    "DriveRuleTable",
    "ElementPresent",
    "ElementUniverse",
    "HeatmapMember",
    "ItemIdIn",
    "MarginalBinMember",
    "Not",
    "Or",
    "OutputRule",
    "PRESETS",
    "RankMap",
    "SVariantSpec",
    "SetPairTable",
    "SetValue",
    "ViewConfig",
    "aggregate",
    "apply_cap",
    "brushed_aggregate",
    "brute_force_oracle",
    "cell_contributions",
    "color_position",
    "default_drive_rules",
    "detail_views",
    "deviation_transform",
    "enumerate_combinations",
    "evaluate_brush",
    "expected_cell_value",
    "gen_drives",
    "gen_s",
    "negate_element",
    "parse_set_value",
    "rank_transform",
    "reorder_elements",
]
