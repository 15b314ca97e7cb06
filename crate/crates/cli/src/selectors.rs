use std::str::FromStr;

/// One entry of `invariants --kinds`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KindSpec {
    I2(usize, usize),
    I3(usize, usize, usize),
    I4(usize, usize, usize),
    J2,
    J3,
    /// `C2[:α]`, `C3[:α]`, `Cn:order[:α]`.
    Casimir {
        order: usize,
        particle: Option<usize>,
    },
}

/// Operand of `compat --op`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OpSpec {
    XBar,
    YBar,
    ZBar,
    J2,
    I2(usize, usize),
    I3(usize, usize, usize),
    I4(usize, usize, usize),
    /// Collective generator `S_j`.
    Collective(usize),
    /// Generator `λ_j` on a single particle.
    Local {
        generator: usize,
        particle: usize,
    },
}

fn indices(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| format!("bad index '{t}'")))
        .collect()
}

fn exactly<const K: usize>(s: Option<&str>, what: &str) -> Result<[usize; K], String> {
    let s = s.ok_or_else(|| format!("{what} needs {K} particle indices, e.g. {what}:0,1"))?;
    let v = indices(s)?;
    v.try_into()
        .map_err(|v: Vec<usize>| format!("{what} needs {K} particle indices, got {}", v.len()))
}

fn optional_index(s: Option<&str>) -> Result<Option<usize>, String> {
    s.map(|t| t.parse().map_err(|_| format!("bad particle index '{t}'")))
        .transpose()
}

impl FromStr for KindSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut parts = s.splitn(2, ':');
        let head = parts.next().unwrap_or_default().to_ascii_uppercase();
        let rest = parts.next();
        match head.as_str() {
            "I2" => exactly::<2>(rest, "I2").map(|[a, b]| KindSpec::I2(a, b)),
            "I3" => exactly::<3>(rest, "I3").map(|[a, b, c]| KindSpec::I3(a, b, c)),
            "I4" => exactly::<3>(rest, "I4").map(|[a, b, c]| KindSpec::I4(a, b, c)),
            "J2" if rest.is_none() => Ok(KindSpec::J2),
            "J3" if rest.is_none() => Ok(KindSpec::J3),
            "C2" | "C3" => Ok(KindSpec::Casimir {
                order: if head == "C2" { 2 } else { 3 },
                particle: optional_index(rest)?,
            }),
            "CN" => {
                let rest = rest.ok_or("Cn needs an order, e.g. Cn:4")?;
                let mut it = rest.splitn(2, ':');
                let order = it
                    .next()
                    .and_then(|o| o.parse().ok())
                    .ok_or_else(|| format!("bad Casimir order in '{s}'"))?;
                Ok(KindSpec::Casimir {
                    order,
                    particle: optional_index(it.next())?,
                })
            }
            _ => Err(format!("unknown invariant kind '{s}'")),
        }
    }
}

impl FromStr for OpSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut parts = s.splitn(2, ':');
        let head = parts.next().unwrap_or_default().to_ascii_lowercase();
        let rest = parts.next();
        match head.as_str() {
            "xbar" => Ok(OpSpec::XBar),
            "ybar" => Ok(OpSpec::YBar),
            "zbar" => Ok(OpSpec::ZBar),
            "j2" => Ok(OpSpec::J2),
            "i2" => exactly::<2>(rest, "i2").map(|[a, b]| OpSpec::I2(a, b)),
            "i3" => exactly::<3>(rest, "i3").map(|[a, b, c]| OpSpec::I3(a, b, c)),
            "i4" => exactly::<3>(rest, "i4").map(|[a, b, c]| OpSpec::I4(a, b, c)),
            "s" => exactly::<1>(rest, "s").map(|[j]| OpSpec::Collective(j)),
            "local" => exactly::<2>(rest, "local").map(|[generator, particle]| OpSpec::Local { generator, particle }),
            _ => Err(format!("unknown operator '{s}'")),
        }
    }
}
