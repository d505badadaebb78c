use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Positions on the grid.
pub const GRID_SIZE: usize = 20;

/// Which points schedule a race uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RaceKind {
    Full,
    Sprint,
}

/// Position → points for full races and sprints. Index 0 is P1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointsTable {
    full_race: [u32; GRID_SIZE],
    sprint: [u32; GRID_SIZE],
}

const FULL_2025: [u32; GRID_SIZE] = [
    25, 18, 15, 12, 10, 8, 6, 4, 2, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0,
];
const SPRINT_2025: [u32; GRID_SIZE] = [8, 7, 6, 5, 4, 3, 2, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0];

impl Default for PointsTable {
    fn default() -> Self {
        Self::season_2025()
    }
}

impl PointsTable {
    /// Current scoring: top ten in a full race, top eight in a sprint.
    pub fn season_2025() -> Self {
        Self {
            full_race: FULL_2025,
            sprint: SPRINT_2025,
        }
    }

    /// Custom schedule; both rows must be non-increasing in position.
    pub fn new(full_race: [u32; GRID_SIZE], sprint: [u32; GRID_SIZE]) -> Result<Self> {
        for (name, row) in [("full", &full_race), ("sprint", &sprint)] {
            if row.windows(2).any(|w| w[1] > w[0]) {
                return Err(Error::InvalidConfig(format!(
                    "{name} points must not increase with position"
                )));
            }
        }
        Ok(Self { full_race, sprint })
    }

    /// Points for a 1-based finishing position.
    #[inline]
    pub fn points(&self, kind: RaceKind, position: u8) -> u32 {
        let idx = usize::from(position.clamp(1, GRID_SIZE as u8)) - 1;
        match kind {
            RaceKind::Full => self.full_race[idx],
            RaceKind::Sprint => self.sprint[idx],
        }
    }

    pub fn row(&self, kind: RaceKind) -> &[u32; GRID_SIZE] {
        match kind {
            RaceKind::Full => &self.full_race,
            RaceKind::Sprint => &self.sprint,
        }
    }

    /// Most points one driver can take from a season.
    pub fn max_season_points(&self, races_full: u32, races_sprint: u32) -> u32 {
        races_full * self.full_race[0] + races_sprint * self.sprint[0]
    }
}
