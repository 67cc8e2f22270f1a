//! Analytical metadata derived from a cleaned corpus, plus the date and
//! affiliation-drift audits.

pub mod authorship;
pub mod dates;
pub mod drift;
pub mod license;
pub mod software;
pub mod tables;
pub mod title;
pub mod volume;

pub use authorship::{classify_authorship, Authorship, AuthorshipClassifier, AuthorshipPosition};
pub use dates::{audit_date_discordance, DateAudit, DateAuditRow};
pub use drift::{audit_affiliation_drift, DriftReport, DriftRow, RecordFetcher, SnapshotFetcher};
pub use license::{normalize_license, LicenseClass, LicenseTable, RIGHTS_UNCLEAR};
pub use software::{detect_software_content, SoftwareContent, SoftwareExtensions};
pub use title::{score_title, TitleScore};
pub use volume::{annual_volume, VolumeTable};
pub use tables::{Assessment, RecordAssessment};
