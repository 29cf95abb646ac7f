//! Measured results of the flat-wire assembly on C- and J-shape jigs, kept as
//! fixed data for consistency checks and comparison tables.

/// One row of a measured results table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasuredTrial {
    pub name: &'static str,
    pub jig_radius_mm: f64,
    pub average_strain_ue: f64,
    pub average_radius_mm: f64,
    pub tip_error_mm: f64,
    pub shape_error_mm: f64,
    pub area_error_avg_mm2: f64,
}

/// Constant-curvature jig, 170 mm of sensor in the slot.
pub const C_SHAPE: [MeasuredTrial; 3] = [
    MeasuredTrial {
        name: "C1",
        jig_radius_mm: 100.0,
        average_strain_ue: 1440.649206,
        average_radius_mm: 100.871357,
        tip_error_mm: 2.097179,
        shape_error_mm: 1.166120,
        area_error_avg_mm2: 1.476396,
    },
    MeasuredTrial {
        name: "C2",
        jig_radius_mm: 80.0,
        average_strain_ue: 1784.726425,
        average_radius_mm: 81.871782,
        tip_error_mm: 0.817171,
        shape_error_mm: 0.593618,
        area_error_avg_mm2: 0.486622,
    },
    MeasuredTrial {
        name: "C3",
        jig_radius_mm: 60.0,
        average_strain_ue: 2397.258935,
        average_radius_mm: 61.460192,
        tip_error_mm: 1.638290,
        shape_error_mm: 0.489858,
        area_error_avg_mm2: 1.155276,
    },
];

/// 50 mm straight lead-in plus 100 mm of arc. Strain is averaged over the
/// full 150 mm, radius over the arc only.
pub const J_SHAPE: [MeasuredTrial; 3] = [
    MeasuredTrial {
        name: "J1",
        jig_radius_mm: 100.0,
        average_strain_ue: 935.08632,
        average_radius_mm: 104.393193,
        tip_error_mm: 1.677861,
        shape_error_mm: 0.542728,
        area_error_avg_mm2: 1.176259,
    },
    MeasuredTrial {
        name: "J2",
        jig_radius_mm: 80.0,
        average_strain_ue: 1176.915874,
        average_radius_mm: 83.546379,
        tip_error_mm: 1.041806,
        shape_error_mm: 0.456734,
        area_error_avg_mm2: 0.686597,
    },
    MeasuredTrial {
        name: "J3",
        jig_radius_mm: 60.0,
        average_strain_ue: 1511.251464,
        average_radius_mm: 63.81685,
        tip_error_mm: 3.36647,
        shape_error_mm: 1.135024,
        area_error_avg_mm2: 2.31199,
    },
];

/// Arc fraction of the J-shape sensor span.
pub const J_ARC_FRACTION: f64 = 100.0 / 150.0;

impl MeasuredTrial {
    /// Strain x radius in mm: the lever arm implied by the measurement.
    pub fn strain_radius_product_mm(&self) -> f64 {
        self.average_strain_ue * 1e-6 * self.average_radius_mm
    }
}
