//! Minimal PLY support for renderer point dumps.
//!
//! Reads `ascii` and `binary_little_endian` files whose vertex element carries
//! x, y, z and red, green, blue. Writes binary little-endian.

use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{PointCloud, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Encoding {
    Ascii,
    BinaryLe,
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
    fn parse(name: &str) -> Option<Self> {
        Some(match name {
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
            Scalar::I32 => i32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
            Scalar::U32 => u32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
            Scalar::F32 => f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
            Scalar::F64 => f64::from_le_bytes(b[..8].try_into().unwrap()),
        }
    }

    /// Scale that maps the type's natural color range onto [0, 1].
    fn color_scale(self) -> f64 {
        match self {
            Scalar::U8 => 255.0,
            Scalar::U16 => 65535.0,
            _ => 1.0,
        }
    }
}

#[derive(Debug, Clone)]
enum Property {
    Scalar { name: String, ty: Scalar },
    List { count: Scalar, item: Scalar },
}

#[derive(Debug, Clone)]
struct Element {
    name: String,
    count: usize,
    properties: Vec<Property>,
}

struct Header {
    encoding: Encoding,
    elements: Vec<Element>,
    body_offset: usize,
}

fn parse_header(bytes: &[u8]) -> Result<Header> {
    const END: &[u8] = b"end_header";
    let end = bytes
        .windows(END.len())
        .position(|w| w == END)
        .ok_or_else(|| Error::format("PLY header has no end_header"))?;
    let mut body_offset = end + END.len();
    if bytes.get(body_offset) == Some(&b'\r') {
        body_offset += 1;
    }
    if bytes.get(body_offset) == Some(&b'\n') {
        body_offset += 1;
    }
    let text = std::str::from_utf8(&bytes[..end])
        .map_err(|_| Error::format("PLY header is not valid text"))?;
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    if lines.next() != Some("ply") {
        return Err(Error::format_at(0, "missing `ply` magic"));
    }
    let mut encoding = None;
    let mut elements: Vec<Element> = Vec::new();
    for line in lines {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens[0] {
            "format" => {
                encoding = Some(match tokens.get(1).copied() {
                    Some("ascii") => Encoding::Ascii,
                    Some("binary_little_endian") => Encoding::BinaryLe,
                    other => {
                        return Err(Error::format(format!(
                            "unsupported PLY encoding {}",
                            other.unwrap_or("<none>")
                        )))
                    }
                })
            }
            "element" => {
                let (name, count) = match tokens.as_slice() {
                    [_, name, count] => (
                        name.to_string(),
                        count
                            .parse()
                            .map_err(|_| Error::format(format!("bad element count `{count}`")))?,
                    ),
                    _ => return Err(Error::format(format!("malformed element line `{line}`"))),
                };
                elements.push(Element {
                    name,
                    count,
                    properties: Vec::new(),
                });
            }
            "property" => {
                let element = elements
                    .last_mut()
                    .ok_or_else(|| Error::format("property before any element"))?;
                let bad = || Error::format(format!("malformed property line `{line}`"));
                let prop = if tokens.get(1) == Some(&"list") {
                    let count = tokens
                        .get(2)
                        .and_then(|t| Scalar::parse(t))
                        .ok_or_else(bad)?;
                    let item = tokens
                        .get(3)
                        .and_then(|t| Scalar::parse(t))
                        .ok_or_else(bad)?;
                    Property::List { count, item }
                } else {
                    let ty = tokens
                        .get(1)
                        .and_then(|t| Scalar::parse(t))
                        .ok_or_else(bad)?;
                    let name = tokens.get(2).ok_or_else(bad)?.to_string();
                    Property::Scalar { name, ty }
                };
                element.properties.push(prop);
            }
            "comment" | "obj_info" => {}
            other => {
                return Err(Error::format(format!(
                    "unknown PLY header keyword `{other}`"
                )))
            }
        }
    }
    Ok(Header {
        encoding: encoding.ok_or_else(|| Error::format("PLY header has no format line"))?,
        elements,
        body_offset,
    })
}

struct VertexLayout {
    xyz: [usize; 3],
    rgb: [usize; 3],
    rgb_scale: [f64; 3],
    intensity: Option<(usize, f64)>,
    types: Vec<Scalar>,
}

fn vertex_layout(element: &Element) -> Result<VertexLayout> {
    let mut types = Vec::new();
    let mut names = Vec::new();
    for p in &element.properties {
        match p {
            Property::Scalar { name, ty } => {
                names.push(name.as_str());
                types.push(*ty);
            }
            Property::List { .. } => {
                return Err(Error::format(
                    "list properties on vertices are not supported",
                ))
            }
        }
    }
    let find = |n: &str| names.iter().position(|&m| m == n);
    let need = |n: &str| {
        find(n).ok_or_else(|| Error::format(format!("vertex element lacks property `{n}`")))
    };
    let xyz = [need("x")?, need("y")?, need("z")?];
    let rgb = [need("red")?, need("green")?, need("blue")?];
    let rgb_scale = rgb.map(|i| types[i].color_scale());
    let intensity = find("intensity").map(|i| (i, types[i].color_scale()));
    Ok(VertexLayout {
        xyz,
        rgb,
        rgb_scale,
        intensity,
        types,
    })
}

fn build_cloud(layout: &VertexLayout, rows: Vec<Vec<f64>>) -> Result<PointCloud> {
    let positions = rows
        .iter()
        .map(|r| Vec3::new(r[layout.xyz[0]], r[layout.xyz[1]], r[layout.xyz[2]]))
        .collect::<Vec<_>>();
    if let Some(i) = positions
        .iter()
        .position(|p| !p.iter().all(|v| v.is_finite()))
    {
        return Err(Error::validation(format!(
            "vertex {i} has a non-finite coordinate"
        )));
    }
    let rgb = rows
        .iter()
        .map(|r| [0, 1, 2].map(|c| r[layout.rgb[c]] / layout.rgb_scale[c]))
        .collect();
    let mut cloud = PointCloud::new(positions).with_rgb(rgb)?;
    if let Some((i, scale)) = layout.intensity {
        cloud = cloud.with_intensity(rows.iter().map(|r| r[i] / scale).collect())?;
    }
    Ok(cloud)
}

fn skip_element_binary(element: &Element, bytes: &[u8], mut pos: usize) -> Result<usize> {
    for _ in 0..element.count {
        for p in &element.properties {
            match p {
                Property::Scalar { ty, .. } => pos += ty.size(),
                Property::List { count, item } => {
                    let b = bytes
                        .get(pos..pos + count.size())
                        .ok_or_else(|| Error::format_at(pos as u64, "PLY body truncated"))?;
                    let n = count.read_le(b) as usize;
                    pos += count.size() + n * item.size();
                }
            }
        }
    }
    Ok(pos)
}

pub fn parse_ply(bytes: &[u8]) -> Result<PointCloud> {
    let header = parse_header(bytes)?;
    let vertex_pos = header
        .elements
        .iter()
        .position(|e| e.name == "vertex")
        .ok_or_else(|| Error::format("PLY has no vertex element"))?;
    let vertex = &header.elements[vertex_pos];
    let layout = vertex_layout(vertex)?;
    let mut rows = Vec::with_capacity(vertex.count);
    match header.encoding {
        Encoding::BinaryLe => {
            let mut pos = header.body_offset;
            for e in &header.elements[..vertex_pos] {
                pos = skip_element_binary(e, bytes, pos)?;
            }
            let stride: usize = layout.types.iter().map(|t| t.size()).sum();
            for _ in 0..vertex.count {
                let rec = bytes
                    .get(pos..pos + stride)
                    .ok_or_else(|| Error::format_at(pos as u64, "PLY vertex data truncated"))?;
                let mut off = 0;
                let row = layout
                    .types
                    .iter()
                    .map(|t| {
                        let v = t.read_le(&rec[off..]);
                        off += t.size();
                        v
                    })
                    .collect();
                rows.push(row);
                pos += stride;
            }
        }
        Encoding::Ascii => {
            let body = std::str::from_utf8(&bytes[header.body_offset..])
                .map_err(|_| Error::format("ASCII PLY body is not valid text"))?;
            let mut tokens = body.split_whitespace();
            let mut next = |what: &str| -> Result<f64> {
                let t = tokens.next().ok_or_else(|| {
                    Error::format(format!("ASCII PLY ended while reading {what}"))
                })?;
                t.parse()
                    .map_err(|_| Error::format(format!("`{t}` is not a number")))
            };
            for e in &header.elements[..vertex_pos] {
                for _ in 0..e.count {
                    for p in &e.properties {
                        match p {
                            Property::Scalar { .. } => {
                                next(&e.name)?;
                            }
                            Property::List { .. } => {
                                let n = next(&e.name)? as usize;
                                for _ in 0..n {
                                    next(&e.name)?;
                                }
                            }
                        }
                    }
                }
            }
            for _ in 0..vertex.count {
                let row = (0..layout.types.len())
                    .map(|_| next("vertex"))
                    .collect::<Result<Vec<f64>>>()?;
                rows.push(row);
            }
        }
    }
    build_cloud(&layout, rows)
}

pub fn read_ply_rgb(path: &Path) -> Result<PointCloud> {
    parse_ply(&super::read_bytes(path)?)
}

/// Writes binary little-endian PLY with float xyz, uchar colors (when
/// present) and float intensity (when present).
pub fn write_ply(cloud: &PointCloud, path: &Path) -> Result<()> {
    let mut out = format!(
        "ply\nformat binary_little_endian 1.0\nelement vertex {}\nproperty float x\nproperty float y\nproperty float z\n",
        cloud.len()
    );
    if cloud.rgb().is_some() {
        out.push_str("property uchar red\nproperty uchar green\nproperty uchar blue\n");
    }
    if cloud.intensity().is_some() {
        out.push_str("property float intensity\n");
    }
    out.push_str("end_header\n");
    let mut bytes = out.into_bytes();
    for (i, p) in cloud.positions().iter().enumerate() {
        for v in [p.x, p.y, p.z] {
            bytes.extend_from_slice(&(v as f32).to_le_bytes());
        }
        if let Some(rgb) = cloud.rgb() {
            bytes.extend(rgb[i].map(|c| (c * 255.0).round().clamp(0.0, 255.0) as u8));
        }
        if let Some(int) = cloud.intensity() {
            bytes.extend_from_slice(&(int[i] as f32).to_le_bytes());
        }
    }
    super::write_bytes(path, &bytes)
}
