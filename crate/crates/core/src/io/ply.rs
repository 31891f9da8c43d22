//! PLY point clouds with `x y z` and optional `nx ny nz` float32 vertex properties.

use std::fs;
use std::path::Path;

use super::IoError;
use crate::cloud::ObjectCloud;
use crate::geometry::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlyEncoding {
    Ascii,
    BinaryLittleEndian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Scalar {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl Scalar {
    fn parse(s: &str) -> Option<Scalar> {
        Some(match s {
            "char" | "int8" => Scalar::I8,
            "uchar" | "uint8" => Scalar::U8,
            "short" | "int16" => Scalar::I16,
            "ushort" | "uint16" => Scalar::U16,
            "int" | "int32" => Scalar::I32,
            "uint" | "uint32" => Scalar::U32,
            "float" | "float32" => Scalar::F32,
            "double" | "float64" => Scalar::F64,
            _ => return None,
        })
    }

    fn size(self) -> usize {
        match self {
            Scalar::I8 | Scalar::U8 => 1,
            Scalar::I16 | Scalar::U16 => 2,
            Scalar::I32 | Scalar::U32 | Scalar::F32 => 4,
            Scalar::F64 => 8,
        }
    }

    fn read_le(self, b: &[u8]) -> f64 {
        match self {
            Scalar::I8 => b[0] as i8 as f64,
            Scalar::U8 => b[0] as f64,
            Scalar::I16 => i16::from_le_bytes([b[0], b[1]]) as f64,
            Scalar::U16 => u16::from_le_bytes([b[0], b[1]]) as f64,
            Scalar::I32 => i32::from_le_bytes(b[..4].try_into().unwrap()) as f64,
            Scalar::U32 => u32::from_le_bytes(b[..4].try_into().unwrap()) as f64,
            Scalar::F32 => f32::from_le_bytes(b[..4].try_into().unwrap()) as f64,
            Scalar::F64 => f64::from_le_bytes(b[..8].try_into().unwrap()),
        }
    }
}

#[derive(Debug)]
enum Property {
    Scalar(String, Scalar),
    List { count: Scalar, item: Scalar },
}

#[derive(Debug)]
struct Element {
    name: String,
    count: usize,
    properties: Vec<Property>,
}

struct Header {
    encoding: PlyEncoding,
    elements: Vec<Element>,
    body_offset: usize,
}

fn header_err(msg: impl Into<String>) -> IoError {
    IoError::MalformedHeader(msg.into())
}

fn parse_header(bytes: &[u8]) -> Result<Header, IoError> {
    let end = find_end_header(bytes).ok_or_else(|| header_err("missing end_header"))?;
    let text = std::str::from_utf8(&bytes[..end.0]).map_err(|_| header_err("header is not UTF-8"))?;
    let mut lines = text.lines().map(str::trim);
    if lines.next() != Some("ply") {
        return Err(header_err("missing 'ply' magic"));
    }
    let mut encoding = None;
    let mut elements: Vec<Element> = Vec::new();
    for line in lines {
        let tok: Vec<&str> = line.split_whitespace().collect();
        match tok.as_slice() {
            [] => {}
            ["comment", ..] | ["obj_info", ..] => {}
            ["format", fmt, _version] => {
                encoding = Some(match *fmt {
                    "ascii" => PlyEncoding::Ascii,
                    "binary_little_endian" => PlyEncoding::BinaryLittleEndian,
                    "binary_big_endian" => {
                        return Err(IoError::UnsupportedEncoding("binary_big_endian".into()))
                    }
                    other => return Err(IoError::UnsupportedEncoding(other.to_string())),
                });
            }
            ["element", name, count] => {
                let count = count.parse().map_err(|_| header_err(format!("bad element count '{count}'")))?;
                elements.push(Element { name: name.to_string(), count, properties: Vec::new() });
            }
            ["property", "list", c, i, _name] => {
                let el = elements.last_mut().ok_or_else(|| header_err("property before element"))?;
                let count = Scalar::parse(c).ok_or_else(|| header_err(format!("unknown type '{c}'")))?;
                let item = Scalar::parse(i).ok_or_else(|| header_err(format!("unknown type '{i}'")))?;
                el.properties.push(Property::List { count, item });
            }
            ["property", ty, name] => {
                let el = elements.last_mut().ok_or_else(|| header_err("property before element"))?;
                let s = Scalar::parse(ty).ok_or_else(|| header_err(format!("unknown type '{ty}'")))?;
                el.properties.push(Property::Scalar(name.to_string(), s));
            }
            ["end_header"] => break,
            _ => return Err(header_err(format!("unrecognised line '{line}'"))),
        }
    }
    let encoding = encoding.ok_or_else(|| header_err("missing format line"))?;
    Ok(Header { encoding, elements, body_offset: end.1 })
}

/// Returns (start of the `end_header` line, first body byte).
fn find_end_header(bytes: &[u8]) -> Option<(usize, usize)> {
    let needle = b"end_header";
    let mut start = 0;
    while start < bytes.len() {
        let nl = bytes[start..].iter().position(|&b| b == b'\n').map(|p| start + p);
        let line_end = nl.unwrap_or(bytes.len());
        let line = &bytes[start..line_end];
        let line = line.strip_suffix(b"\r").unwrap_or(line);
        if line == needle {
            return Some((start, nl.map_or(bytes.len(), |n| n + 1)));
        }
        start = line_end + 1;
    }
    None
}

struct Layout {
    x: usize,
    y: usize,
    z: usize,
    normals: Option<[usize; 3]>,
}

fn vertex_layout(el: &Element) -> Result<Layout, IoError> {
    // rows hold scalar properties only
    let find = |n: &str| {
        el.properties
            .iter()
            .filter(|p| matches!(p, Property::Scalar(..)))
            .position(|p| matches!(p, Property::Scalar(name, _) if name == n))
    };
    let (x, y, z) = match (find("x"), find("y"), find("z")) {
        (Some(x), Some(y), Some(z)) => (x, y, z),
        _ => return Err(header_err("vertex element lacks x/y/z")),
    };
    let normals = match (find("nx"), find("ny"), find("nz")) {
        (Some(a), Some(b), Some(c)) => Some([a, b, c]),
        (None, None, None) => None,
        _ => return Err(header_err("partial normal properties")),
    };
    Ok(Layout { x, y, z, normals })
}

fn body_err(msg: impl Into<String>) -> IoError {
    IoError::MalformedBody(msg.into())
}

/// Parses PLY bytes into a cloud named `name`. Elements other than `vertex`
/// are skipped.
pub fn parse_ply(bytes: &[u8], name: &str) -> Result<ObjectCloud, IoError> {
    let header = parse_header(bytes)?;
    let vi = header
        .elements
        .iter()
        .position(|e| e.name == "vertex")
        .ok_or_else(|| header_err("no vertex element"))?;
    let layout = vertex_layout(&header.elements[vi])?;
    let body = &bytes[header.body_offset..];
    let rows = match header.encoding {
        PlyEncoding::Ascii => ascii_rows(body, &header.elements, vi)?,
        PlyEncoding::BinaryLittleEndian => binary_rows(body, &header.elements, vi)?,
    };
    let mut points = Vec::with_capacity(rows.len());
    let mut normals = layout.normals.map(|_| Vec::with_capacity(rows.len()));
    for row in &rows {
        points.push(Vec3::new(row[layout.x], row[layout.y], row[layout.z]));
        if let (Some(n), Some([a, b, c])) = (normals.as_mut(), layout.normals) {
            n.push(Vec3::new(row[a], row[b], row[c]));
        }
    }
    let cloud = ObjectCloud { name: name.to_string(), points, normals };
    cloud.validate().map_err(|e| IoError::Invalid(e.to_string()))?;
    Ok(cloud)
}

/// Scalar property values of each vertex row; list properties are dropped.
fn ascii_rows(body: &[u8], elements: &[Element], vi: usize) -> Result<Vec<Vec<f64>>, IoError> {
    let text = std::str::from_utf8(body).map_err(|_| body_err("ASCII body is not UTF-8"))?;
    let mut tokens = text.split_whitespace();
    let mut out = Vec::new();
    for (ei, el) in elements.iter().enumerate() {
        for r in 0..el.count {
            let mut row = Vec::new();
            for p in &el.properties {
                let mut next = || {
                    tokens.next().ok_or_else(|| body_err(format!("element '{}' row {r} truncated", el.name)))
                };
                match p {
                    Property::Scalar(_, ty) => {
                        let t = next()?;
                        let bad = |_| body_err(format!("bad number '{t}'"));
                        // float32 text is read at float32 precision, as binary would be
                        let v = match ty {
                            Scalar::F32 => t.parse::<f32>().map_err(bad)? as f64,
                            _ => t.parse::<f64>().map_err(bad)?,
                        };
                        row.push(v);
                    }
                    Property::List { .. } => {
                        let t = next()?;
                        let n: usize = t.parse().map_err(|_| body_err(format!("bad list count '{t}'")))?;
                        for _ in 0..n {
                            next()?;
                        }
                    }
                }
            }
            if ei == vi {
                out.push(row);
            }
        }
    }
    Ok(out)
}

fn binary_rows(body: &[u8], elements: &[Element], vi: usize) -> Result<Vec<Vec<f64>>, IoError> {
    let mut pos = 0usize;
    let mut take = |n: usize| -> Result<&[u8], IoError> {
        let s = body.get(pos..pos + n).ok_or_else(|| body_err("binary body truncated"))?;
        pos += n;
        Ok(s)
    };
    let mut out = Vec::new();
    for (ei, el) in elements.iter().enumerate() {
        for _ in 0..el.count {
            let mut row = Vec::new();
            for p in &el.properties {
                match p {
                    Property::Scalar(_, s) => row.push(s.read_le(take(s.size())?)),
                    Property::List { count, item } => {
                        let n = count.read_le(take(count.size())?);
                        if n < 0.0 {
                            return Err(body_err("negative list count"));
                        }
                        take(n as usize * item.size())?;
                    }
                }
            }
            if ei == vi {
                out.push(row);
            }
        }
        if ei == vi {
            break;
        }
    }
    Ok(out)
}

pub fn load_ply(path: &Path) -> Result<ObjectCloud, IoError> {
    let bytes = fs::read(path).map_err(|e| IoError::read(path, e))?;
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    parse_ply(&bytes, &name)
}

/// Serializes a cloud with float32 properties.
pub fn write_ply(cloud: &ObjectCloud, encoding: PlyEncoding) -> Vec<u8> {
    let mut out = String::from("ply\n");
    out.push_str(match encoding {
        PlyEncoding::Ascii => "format ascii 1.0\n",
        PlyEncoding::BinaryLittleEndian => "format binary_little_endian 1.0\n",
    });
    if !cloud.name.is_empty() && !cloud.name.contains('\n') {
        out.push_str(&format!("comment name {}\n", cloud.name));
    }
    out.push_str(&format!("element vertex {}\n", cloud.points.len()));
    for p in ["x", "y", "z"] {
        out.push_str(&format!("property float {p}\n"));
    }
    if cloud.normals.is_some() {
        for p in ["nx", "ny", "nz"] {
            out.push_str(&format!("property float {p}\n"));
        }
    }
    out.push_str("end_header\n");
    let mut bytes = out.into_bytes();
    let row = |i: usize| -> Vec<f32> {
        let mut r: Vec<f32> = cloud.points[i].iter().map(|&v| v as f32).collect();
        if let Some(n) = &cloud.normals {
            r.extend(n[i].iter().map(|&v| v as f32));
        }
        r
    };
    for i in 0..cloud.points.len() {
        let r = row(i);
        match encoding {
            PlyEncoding::Ascii => {
                let line: Vec<String> = r.iter().map(|v| format!("{v:?}")).collect();
                bytes.extend_from_slice(line.join(" ").as_bytes());
                bytes.push(b'\n');
            }
            PlyEncoding::BinaryLittleEndian => {
                for v in r {
                    bytes.extend_from_slice(&v.to_le_bytes());
                }
            }
        }
    }
    bytes
}

pub fn save_ply(cloud: &ObjectCloud, path: &Path, encoding: PlyEncoding) -> Result<(), IoError> {
    fs::write(path, write_ply(cloud, encoding)).map_err(|e| IoError::write(path, e))
}
