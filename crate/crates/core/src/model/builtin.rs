use super::{Customer, Instance, ModelError, Point};

/// Reference customers: `(x km, y km, package mass kg)` for ids 1..=18, depot
/// at the origin of a 10 km x 10 km service area.
pub const APPENDIX_D_CUSTOMERS: [(f64, f64, f64); 18] = [
    (0.88, -4.81, 0.89),
    (1.99, 2.53, 0.64),
    (-3.12, 1.02, 1.94),
    (-4.56, 4.62, 0.88),
    (-2.95, 1.64, 0.92),
    (-3.94, 1.07, 1.65),
    (2.27, -0.51, 1.70),
    (1.79, -2.75, 1.32),
    (-0.26, 1.70, 1.07),
    (-0.52, 2.36, 1.07),
    (-2.14, 0.05, 1.12),
    (2.40, 3.49, 1.67),
    (-2.61, -2.06, 1.91),
    (-0.62, 1.77, 0.66),
    (3.84, -0.79, 1.91),
    (-2.11, 1.82, 1.70),
    (2.85, -2.79, 1.00),
    (2.59, 0.49, 0.97),
];

/// Depot at (0, 0) plus the first `n` reference customers.
pub fn appendix_d_instance(n: usize) -> Result<Instance, ModelError> {
    if !(1..=APPENDIX_D_CUSTOMERS.len()).contains(&n) {
        return Err(ModelError::OutOfRange { what: "n", value: n.to_string(), range: "1..=18".into() });
    }
    let customers = APPENDIX_D_CUSTOMERS[..n]
        .iter()
        .enumerate()
        .map(|(i, &(x, y, m))| Customer::new(i + 1, Point::new(x, y), m))
        .collect();
    Instance::new(Point::ORIGIN, customers)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_customers() {
        let inst = appendix_d_instance(10).unwrap();
        assert_eq!(inst.len(), 10);
        let c1 = inst.customer(1).unwrap();
        assert_eq!(c1.position, Point::new(0.88, -4.81));
        assert_eq!(c1.package_mass, 0.89);
    }

    #[test]
    fn eighteen_customers() {
        let inst = appendix_d_instance(18).unwrap();
        let c = inst.customer(18).unwrap();
        assert_eq!(c.position, Point::new(2.59, 0.49));
        assert_eq!(c.package_mass, 0.97);
    }

    #[test]
    fn out_of_range() {
        assert!(matches!(appendix_d_instance(0), Err(ModelError::OutOfRange { .. })));
        assert!(matches!(appendix_d_instance(19), Err(ModelError::OutOfRange { .. })));
    }
}
