//! Plain-text file formats.
//!
//! | data | layout |
//! |---|---|
//! | diagram | CSV `dim,birth,death,essential` |
//! | scalar field | `rows cols x0 y0 x1 y1`, then `rows` lines of `cols` reals |
//! | curve | CSV `t,k1,...,kK`, one row per grid point |
//! | surface | CSV `birth,death,value` |
//! | point cloud | CSV `x,y` |
//! | distance matrix | square headerless CSV |
//! | embedding | CSV `id,x1,...,xd` |
//! | labels | CSV `id,label` |
//! | config | `key = value` lines, `#` comments |
//!
//! Diagram and curve files may start with `# key=value ...` lines carrying
//! metadata (orientation, summary kind and parameters). Readers accept files
//! without them. Reals are written in Rust's shortest round-trip form, so
//! write-then-read is exact.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::summaries::SummarySurface;
use crate::types::{
    CurveParams, DiagramPoint, Extent, Grid1D, Orientation, PersistenceDiagram, PointCloud, ScalarField, SummaryCurve,
    SummaryKind,
};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_f64(s: &str, line: usize, what: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| parse_err(line, format!("{what}: '{s}' is not a number")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("{what}: non-finite value")));
    }
    Ok(v)
}

fn parse_usize(s: &str, line: usize, what: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| parse_err(line, format!("{what}: '{s}' is not a non-negative integer")))
}

/// Leading `#` lines parsed as whitespace-separated `key=value` pairs, the
/// remaining body, and the number of lines consumed.
fn split_meta(text: &str) -> (BTreeMap<String, String>, &str, usize) {
    let mut meta = BTreeMap::new();
    let mut offset = 0;
    let mut lines = 0;
    for line in text.split_inclusive('\n') {
        let t = line.trim();
        if !t.starts_with('#') {
            break;
        }
        for kv in t.trim_start_matches('#').split_whitespace() {
            if let Some((k, v)) = kv.split_once('=') {
                meta.insert(k.to_string(), v.to_string());
            }
        }
        offset += line.len();
        lines += 1;
    }
    (meta, &text[offset..], lines)
}

fn read_text(mut r: impl Read) -> Result<String> {
    let mut s = String::new();
    r.read_to_string(&mut s)?;
    Ok(s)
}

/// Header-checked CSV records with 1-based file line numbers.
fn csv_records(body: &str, skipped: usize, header: Option<&[&str]>) -> Result<Vec<(usize, Vec<String>)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(header.is_some())
        .trim(csv::Trim::All)
        .flexible(header.is_none())
        .from_reader(body.as_bytes());
    if let Some(want) = header {
        let got = rdr.headers()?.clone();
        let got: Vec<&str> = got.iter().collect();
        if got != want {
            return Err(parse_err(
                skipped + 1,
                format!("expected header '{}', found '{}'", want.join(","), got.join(",")),
            ));
        }
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0) + skipped;
            parse_err(line, e.to_string())
        })?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0) + skipped;
        out.push((line, rec.iter().map(str::to_string).collect()));
    }
    Ok(out)
}

fn orientation_name(o: Orientation) -> &'static str {
    match o {
        Orientation::SublevelCanonical => "sublevel",
        Orientation::SuperlevelNegated => "superlevel-negated",
    }
}

pub fn write_diagram(w: impl Write, diagram: &PersistenceDiagram) -> Result<()> {
    let mut w = w;
    writeln!(w, "# orientation={}", orientation_name(diagram.orientation))?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["dim", "birth", "death", "essential"])?;
    for p in &diagram.points {
        out.write_record([
            p.dim.to_string(),
            p.birth.to_string(),
            p.death.to_string(),
            u8::from(p.essential).to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_diagram(r: impl Read) -> Result<PersistenceDiagram> {
    let text = read_text(r)?;
    let (meta, body, skipped) = split_meta(&text);
    let orientation = match meta.get("orientation").map(String::as_str) {
        None | Some("sublevel") => Orientation::SublevelCanonical,
        Some("superlevel-negated") => Orientation::SuperlevelNegated,
        Some(other) => return Err(parse_err(1, format!("unknown orientation '{other}'"))),
    };
    let mut points = Vec::new();
    for (line, rec) in csv_records(body, skipped, Some(&["dim", "birth", "death", "essential"]))? {
        let essential = match rec[3].as_str() {
            "0" | "false" => false,
            "1" | "true" => true,
            other => return Err(parse_err(line, format!("essential: '{other}' is not 0/1"))),
        };
        let p = DiagramPoint {
            dim: parse_usize(&rec[0], line, "dim")?,
            birth: parse_f64(&rec[1], line, "birth")?,
            death: parse_f64(&rec[2], line, "death")?,
            essential,
        };
        if p.death < p.birth {
            return Err(parse_err(line, "death precedes birth"));
        }
        points.push(p);
    }
    PersistenceDiagram::new(points, orientation)
}

pub fn write_field(mut w: impl Write, field: &ScalarField) -> Result<()> {
    let e = field.extent;
    writeln!(w, "{} {} {} {} {} {}", field.rows(), field.cols(), e.x0, e.y0, e.x1, e.y1)?;
    for row in field.values().chunks(field.cols()) {
        let line: Vec<String> = row.iter().map(f64::to_string).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    Ok(())
}

pub fn read_field(r: impl Read) -> Result<ScalarField> {
    let text = read_text(r)?;
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "empty field file"))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 6 {
        return Err(parse_err(hl, "expected header 'rows cols x0 y0 x1 y1'"));
    }
    let rows = parse_usize(h[0], hl, "rows")?;
    let cols = parse_usize(h[1], hl, "cols")?;
    let ext = [
        parse_f64(h[2], hl, "x0")?,
        parse_f64(h[3], hl, "y0")?,
        parse_f64(h[4], hl, "x1")?,
        parse_f64(h[5], hl, "y1")?,
    ];
    if rows == 0 || cols == 0 {
        return Err(Error::EmptyField);
    }
    let mut values = Vec::with_capacity(rows * cols);
    let mut seen = 0;
    for (line, l) in lines {
        seen += 1;
        if seen > rows {
            return Err(parse_err(line, format!("more than {rows} rows")));
        }
        let before = values.len();
        for tok in l.split_whitespace() {
            values.push(parse_f64(tok, line, "value")?);
        }
        if values.len() - before != cols {
            return Err(parse_err(line, format!("expected {cols} values, found {}", values.len() - before)));
        }
    }
    if seen != rows {
        return Err(parse_err(hl, format!("expected {rows} rows, found {seen}")));
    }
    ScalarField::new(rows, cols, values, Extent::new(ext[0], ext[1], ext[2], ext[3]))
}

fn curve_meta(c: &SummaryCurve) -> String {
    let mut s = format!("# kind={}", c.kind);
    let p = &c.params;
    if let Some(d) = p.dim {
        s += &format!(" dim={d}");
    }
    if let Some(k) = p.kernel {
        s += &format!(" kernel={k}");
    }
    if let Some(h) = p.bandwidth {
        s += &format!(" h={h}");
    }
    if let Some(w) = p.weight_power {
        s += &format!(" p={w}");
    }
    s
}

pub fn write_curve(mut w: impl Write, curve: &SummaryCurve) -> Result<()> {
    writeln!(w, "{}", curve_meta(curve))?;
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["t".to_string()];
    header.extend((1..=curve.order_count()).map(|k| format!("k{k}")));
    out.write_record(&header)?;
    for (i, t) in curve.grid.points().enumerate() {
        let mut rec = vec![t.to_string()];
        rec.extend(curve.orders.iter().map(|row| row[i].to_string()));
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a curve file. The kind comes from the file's metadata line, else
/// from `fallback`; the `t` column must be uniformly spaced.
pub fn read_curve(r: impl Read, fallback: Option<SummaryKind>) -> Result<SummaryCurve> {
    let text = read_text(r)?;
    let (meta, body, skipped) = split_meta(&text);
    let kind = match meta.get("kind") {
        Some(k) => k.parse()?,
        None => fallback.ok_or_else(|| Error::BadConfig("curve file does not name its summary kind".into()))?,
    };
    let mut params = CurveParams::default();
    if let Some(d) = meta.get("dim") {
        params.dim = Some(parse_usize(d, 1, "dim")?);
    }
    if let Some(k) = meta.get("kernel") {
        params.kernel = Some(k.parse::<Kernel>()?);
    }
    if let Some(h) = meta.get("h") {
        params.bandwidth = Some(parse_f64(h, 1, "h")?);
    }
    if let Some(p) = meta.get("p") {
        params.weight_power = Some(parse_f64(p, 1, "p")?);
    }

    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(body.as_bytes());
    let header = rdr.headers()?.clone();
    let k_max = header.len().saturating_sub(1);
    let ok = header.get(0) == Some("t") && k_max >= 1 && (1..=k_max).all(|k| header.get(k) == Some(&format!("k{k}")[..]));
    if !ok {
        return Err(parse_err(skipped + 1, "expected header 't,k1,...,kK'"));
    }
    let mut ts = Vec::new();
    let mut orders = vec![Vec::new(); k_max];
    for (line, rec) in csv_records(body, skipped, None)?.into_iter().skip(1) {
        if rec.len() != k_max + 1 {
            return Err(parse_err(line, format!("expected {} fields, found {}", k_max + 1, rec.len())));
        }
        ts.push(parse_f64(&rec[0], line, "t")?);
        for (k, row) in orders.iter_mut().enumerate() {
            row.push(parse_f64(&rec[k + 1], line, "value")?);
        }
    }
    if ts.len() < 2 {
        return Err(parse_err(skipped + 1, "curve needs at least two grid points"));
    }
    let grid = Grid1D::new(ts[0], ts[ts.len() - 1], ts.len())?;
    let tol = 1e-9 * grid.step() + 1e-12 * grid.t0().abs().max(grid.t1().abs());
    for (i, &t) in ts.iter().enumerate() {
        if (t - grid.at(i)).abs() > tol {
            return Err(parse_err(skipped + 2 + i, format!("t = {t} breaks uniform spacing")));
        }
    }
    Ok(SummaryCurve::new(grid, orders, kind)?.with_params(params))
}

pub fn write_surface(w: impl Write, surface: &SummarySurface) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["birth", "death", "value"])?;
    for (a, b) in surface.birth_grid.points().enumerate() {
        for (c, d) in surface.death_grid.points().enumerate() {
            out.write_record([b.to_string(), d.to_string(), surface.values[a][c].to_string()])?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_cloud(w: impl Write, cloud: &PointCloud) -> Result<()> {
    if cloud.dim() != 2 {
        return Err(Error::InvalidValue("cloud CSV holds planar points".into()));
    }
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["x", "y"])?;
    for p in cloud.iter() {
        out.write_record([p[0].to_string(), p[1].to_string()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_cloud(r: impl Read) -> Result<PointCloud> {
    let text = read_text(r)?;
    let (_, body, skipped) = split_meta(&text);
    let mut coords = Vec::new();
    for (line, rec) in csv_records(body, skipped, Some(&["x", "y"]))? {
        coords.push(parse_f64(&rec[0], line, "x")?);
        coords.push(parse_f64(&rec[1], line, "y")?);
    }
    PointCloud::new(2, coords)
}

pub fn write_matrix(w: impl Write, m: &[Vec<f64>]) -> Result<()> {
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    for row in m {
        out.write_record(row.iter().map(f64::to_string))?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a square headerless matrix.
pub fn read_matrix(r: impl Read) -> Result<Vec<Vec<f64>>> {
    let text = read_text(r)?;
    let recs = csv_records(&text, 0, None)?;
    let n = recs.len();
    let mut m = Vec::with_capacity(n);
    for (line, rec) in recs {
        if rec.len() != n {
            return Err(parse_err(line, format!("matrix is not square: {} columns in a {n}-row file", rec.len())));
        }
        m.push(rec.iter().map(|s| parse_f64(s, line, "entry")).collect::<Result<Vec<f64>>>()?);
    }
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    Ok(m)
}

pub fn write_embedding(w: impl Write, coords: &[Vec<f64>]) -> Result<()> {
    let d = coords.first().map_or(0, Vec::len);
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["id".to_string()];
    header.extend((1..=d).map(|k| format!("x{k}")));
    out.write_record(&header)?;
    for (i, row) in coords.iter().enumerate() {
        let mut rec = vec![i.to_string()];
        rec.extend(row.iter().map(f64::to_string));
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_embedding(r: impl Read) -> Result<Vec<Vec<f64>>> {
    let text = read_text(r)?;
    let mut out = Vec::new();
    for (line, rec) in csv_records(&text, 0, None)?.into_iter().skip(1) {
        out.push(rec[1..].iter().map(|s| parse_f64(s, line, "coordinate")).collect::<Result<Vec<f64>>>()?);
    }
    Ok(out)
}

pub fn write_labels(w: impl Write, labels: &[usize]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["id", "label"])?;
    for (i, l) in labels.iter().enumerate() {
        out.write_record([i.to_string(), l.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// Labels in file order; ids must run `0, 1, 2, ...`.
pub fn read_labels(r: impl Read) -> Result<Vec<usize>> {
    let text = read_text(r)?;
    let mut out = Vec::new();
    for (line, rec) in csv_records(&text, 0, Some(&["id", "label"]))? {
        let id = parse_usize(&rec[0], line, "id")?;
        if id != out.len() {
            return Err(parse_err(line, format!("expected id {}, found {id}", out.len())));
        }
        out.push(parse_usize(&rec[1], line, "label")?);
    }
    Ok(out)
}

/// Flat `key = value` configuration with the line each key was set on.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    entries: BTreeMap<String, (usize, String)>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let l = raw.split('#').next().unwrap_or("").trim();
            if l.is_empty() {
                continue;
            }
            let (k, v) = l
                .split_once('=')
                .ok_or_else(|| parse_err(line, format!("expected 'key = value', found '{l}'")))?;
            let k = k.trim();
            if k.is_empty() {
                return Err(parse_err(line, "empty key"));
            }
            if entries.insert(k.to_string(), (line, v.trim().to_string())).is_some() {
                return Err(parse_err(line, format!("duplicate key '{k}'")));
            }
        }
        Ok(Config { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(_, v)| v.as_str())
    }

    pub fn line(&self, key: &str) -> Option<usize> {
        self.entries.get(key).map(|(l, _)| *l)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

/// Writes `key=value` lines, one per pair.
pub fn write_kv<K: AsRef<str>, V: AsRef<str>>(mut w: impl Write, pairs: &[(K, V)]) -> Result<()> {
    for (k, v) in pairs {
        writeln!(w, "{}={}", k.as_ref(), v.as_ref())?;
    }
    Ok(())
}
