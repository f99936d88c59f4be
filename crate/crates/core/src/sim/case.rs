use serde::{Deserialize, Serialize};

use crate::network::CountryId;

/// Identifier of a case in a run's registry; doubles as its creation index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CaseId(u64);

impl CaseId {
    pub(crate) fn new(raw: u64) -> Self {
        Self(raw)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseKind {
    /// Work that arrived at its own country.
    National,
    /// Assistance one country performs for another.
    InternationalSubrequest,
}

/// One unit of work and its lifecycle timestamps.
///
/// A national case that needs foreign assistance records the spawned
/// sub-request in `dependency_id`; the sub-request points back through
/// `parent_id`. `host` is where the work is served: the origin for national
/// cases, the partner for sub-requests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub id: CaseId,
    pub origin: CountryId,
    pub host: CountryId,
    pub kind: CaseKind,
    pub parent_id: Option<CaseId>,
    pub dependency_id: Option<CaseId>,
    pub created_period: u32,
    pub served_period: Option<u32>,
    pub closed_period: Option<u32>,
}

impl Case {
    /// National case that cannot close until a partner answers.
    pub fn is_dependent(&self) -> bool {
        self.dependency_id.is_some()
    }

    pub fn is_closed(&self) -> bool {
        self.closed_period.is_some()
    }

    /// Served but blocked on a partner's answer.
    pub fn is_awaiting(&self) -> bool {
        self.served_period.is_some() && self.closed_period.is_none()
    }
}
