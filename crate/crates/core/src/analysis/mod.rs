//! Reference imaging and point-target metrology.

mod metrics;
mod oracle;
mod report;

pub use metrics::{
    irw, islr, locate_peak, profile_cut, pslr, CutAxis, Islr, Peak, Profile, PsfAnalyzer,
    DEFAULT_OVERSAMPLE, DEFAULT_SIDELOBE_EXTENT,
};
pub use oracle::{oracle_image, PixelGrid, ORACLE_MAX_PIXELS, ORACLE_MAX_SAMPLES};
pub use report::{quality_report, Db, QualityReport, ReportOptions, TargetQuality};
