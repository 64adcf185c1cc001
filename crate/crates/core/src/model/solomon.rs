//! Reader for the canonical Solomon VRPTW text layout and the rescaling used
//! to turn a 100-customer benchmark into small drone instances.

use super::{min_max_map, Customer, Instance, ModelError, Point};

/// One row of the customer table, unconverted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolomonNode {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub demand: f64,
    pub ready: f64,
    pub due: f64,
    pub service: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolomonData {
    pub name: String,
    pub vehicle_count: usize,
    pub vehicle_capacity: f64,
    /// All rows in file order; node 0 is the depot.
    pub nodes: Vec<SolomonNode>,
}

impl SolomonData {
    pub fn depot(&self) -> &SolomonNode {
        self.nodes.iter().find(|n| n.id == 0).expect("validated at parse time")
    }

    pub fn customer_count(&self) -> usize {
        self.nodes.len() - 1
    }
}

/// The first benchmark of each distribution (C101, R101, RC101), shipped with
/// the crate. Lookup is case-insensitive.
pub fn bundled_solomon(name: &str) -> Option<&'static str> {
    match name.to_ascii_lowercase().as_str() {
        "c101" => Some(include_str!("../../data/solomon/c101.txt")),
        "r101" => Some(include_str!("../../data/solomon/r101.txt")),
        "rc101" => Some(include_str!("../../data/solomon/rc101.txt")),
        _ => None,
    }
}

pub const BUNDLED_SOLOMON: [&str; 3] = ["C101", "R101", "RC101"];

fn perr(line: usize, reason: impl Into<String>) -> ModelError {
    ModelError::ParseError { line, reason: reason.into() }
}

pub fn parse_solomon(text: &str) -> Result<SolomonData, ModelError> {
    let lines: Vec<(usize, &str)> =
        text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty()).collect();
    let mut it = lines.iter().copied().peekable();

    let (_, name) = it.next().ok_or_else(|| perr(1, "empty input"))?;
    let name = name.to_string();

    let (ln, vehicle) = it.next().ok_or_else(|| perr(1, "missing VEHICLE section"))?;
    if !vehicle.eq_ignore_ascii_case("VEHICLE") {
        return Err(perr(ln, format!("expected VEHICLE, found {vehicle:?}")));
    }
    let (ln, header) = it.next().ok_or_else(|| perr(ln, "missing vehicle header"))?;
    if !header.to_ascii_uppercase().starts_with("NUMBER") {
        return Err(perr(ln, format!("expected NUMBER/CAPACITY header, found {header:?}")));
    }
    let (ln, counts) = it.next().ok_or_else(|| perr(ln, "missing vehicle numbers"))?;
    let fields: Vec<&str> = counts.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(perr(ln, "vehicle line must hold NUMBER and CAPACITY"));
    }
    let vehicle_count = fields[0].parse::<usize>().map_err(|e| perr(ln, format!("vehicle number: {e}")))?;
    let vehicle_capacity = fields[1].parse::<f64>().map_err(|e| perr(ln, format!("vehicle capacity: {e}")))?;

    let (ln, customer) = it.next().ok_or_else(|| perr(ln, "missing CUSTOMER section"))?;
    if !customer.eq_ignore_ascii_case("CUSTOMER") {
        return Err(perr(ln, format!("expected CUSTOMER, found {customer:?}")));
    }
    if let Some((_, h)) = it.peek() {
        if h.to_ascii_uppercase().starts_with("CUST") {
            it.next();
        }
    }

    let mut nodes = Vec::new();
    for (ln, row) in it {
        let fields: Vec<&str> = row.split_whitespace().collect();
        if fields.len() != 7 {
            return Err(perr(ln, format!("expected 7 fields, found {}", fields.len())));
        }
        let num = |k: usize| fields[k].parse::<f64>().map_err(|e| perr(ln, format!("field {}: {e}", k + 1)));
        let id = fields[0].parse::<usize>().map_err(|e| perr(ln, format!("customer number: {e}")))?;
        nodes.push(SolomonNode {
            id,
            x: num(1)?,
            y: num(2)?,
            demand: num(3)?,
            ready: num(4)?,
            due: num(5)?,
            service: num(6)?,
        });
    }
    if nodes.is_empty() {
        return Err(perr(lines.last().map_or(1, |l| l.0), "customer table is empty"));
    }
    if !nodes.iter().any(|n| n.id == 0) {
        return Err(ModelError::MissingDepot);
    }
    Ok(SolomonData { name, vehicle_count, vehicle_capacity, nodes })
}

/// Min-max maps every node (depot included) onto `[0, side]^2`, customer
/// demands onto `[mass_lo, mass_hi]`, and keeps customers with original ids
/// `10(s-1)+1 ..= 10s` for `subset = s`. Customers are renumbered `1..=10`.
pub fn rescale_solomon(data: &SolomonData, area_side_km: f64, mass_range_kg: (f64, f64), subset: usize) -> Result<Instance, ModelError> {
    const BLOCK: usize = 10;
    if !(area_side_km > 0.0) {
        return Err(ModelError::InvalidParameter(format!("area side {area_side_km} must be positive")));
    }
    let (lo, hi) = mass_range_kg;
    if !(lo > 0.0 && lo < hi) {
        return Err(ModelError::InvalidParameter(format!("mass range [{lo}, {hi}] must satisfy 0 < lo < hi")));
    }
    let blocks = data.customer_count() / BLOCK;
    if subset < 1 || subset > blocks {
        return Err(ModelError::OutOfRange { what: "subset", value: subset.to_string(), range: format!("1..={blocks}") });
    }

    let xs: Vec<f64> = data.nodes.iter().map(|n| n.x).collect();
    let ys: Vec<f64> = data.nodes.iter().map(|n| n.y).collect();
    let xs = min_max_map(&xs, 0.0, area_side_km).ok_or(ModelError::DegenerateBoundingBox('x'))?;
    let ys = min_max_map(&ys, 0.0, area_side_km).ok_or(ModelError::DegenerateBoundingBox('y'))?;

    let customer_rows: Vec<usize> = (0..data.nodes.len()).filter(|&i| data.nodes[i].id != 0).collect();
    let demands: Vec<f64> = customer_rows.iter().map(|&i| data.nodes[i].demand).collect();
    let masses = min_max_map(&demands, lo, hi).ok_or_else(|| ModelError::InvalidParameter("all demands are equal".into()))?;

    let depot_row = data.nodes.iter().position(|n| n.id == 0).ok_or(ModelError::MissingDepot)?;
    let first = BLOCK * (subset - 1) + 1;
    let mut customers = Vec::with_capacity(BLOCK);
    for original in first..first + BLOCK {
        let k = customer_rows
            .iter()
            .position(|&i| data.nodes[i].id == original)
            .ok_or_else(|| ModelError::InvalidParameter(format!("customer {original} not present")))?;
        let row = customer_rows[k];
        customers.push(Customer::new(customers.len() + 1, Point::new(xs[row], ys[row]), masses[k]));
    }
    Instance::new(Point::new(xs[depot_row], ys[depot_row]), customers)
}
