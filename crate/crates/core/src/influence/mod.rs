//! Correlation analyses between sources and candidates, and windowed lag heatmaps.

mod correlation;
mod heatmap;

pub use correlation::{
    co_correlation, co_correlation_matrix, cross_source_correlation, source_correlation_table,
    CoCorrelation, CoCorrelationMatrix, PairCorrelation, SourcePairCorrelation,
};
pub use heatmap::{
    heatmap_from_intensities, lag_heatmap, lag_heatmap_in_range, offset_label, HeatmapSpec,
    LagHeatmap,
};
