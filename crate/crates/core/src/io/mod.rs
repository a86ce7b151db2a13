//! Net documents, OBJ export and JSON reports.

mod document;
mod obj;
mod report;

pub use document::{load_net, save_net, NetDocument, FORMAT_TAG, FORMAT_VERSION};
pub use obj::{export_obj, ObjMesh};
pub use report::{Report, REPORT_FORMAT};
