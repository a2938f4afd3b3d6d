//! File formats: model documents, dataset CSV, run reports and flag values.

mod flags;
mod model;
mod report;
mod table;

pub use flags::{parse_condition, parse_name_list};
pub use model::{ComponentSpec, KindHint, LoadedModel, ModelFile, ModelSpec};
pub use report::{
    AxiomCheckDoc, GraphDoc, PurgeDoc, PurgeStepDoc, RelevanceDoc, ReportDocument, StatementDoc, SynthDoc,
    ViolationDoc, WitnessDoc,
};
pub use table::{read_csv, read_csv_path, write_csv, write_csv_path, CATEGORICAL_MAX_LEVELS};
