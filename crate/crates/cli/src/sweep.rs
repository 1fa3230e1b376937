//! Sweep grammar: "param=start:stop:count:scale" with scale lin or log.

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub param: String,
    pub values: Vec<f64>,
}

pub fn parse(text: &str) -> Result<Sweep, String> {
    let (param, rest) = text
        .split_once('=')
        .ok_or_else(|| format!("sweep {text:?} missing '='"))?;
    let parts: Vec<&str> = rest.split(':').collect();
    if parts.len() != 4 {
        return Err(format!(
            "sweep {text:?} must be param=start:stop:count:scale"
        ));
    }
    let start: f64 = parts[0]
        .parse()
        .map_err(|e| format!("bad sweep start: {e}"))?;
    let stop: f64 = parts[1].parse().map_err(|e| format!("bad sweep stop: {e}"))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|e| format!("bad sweep count: {e}"))?;
    if count < 1 {
        return Err("sweep count must be >= 1".into());
    }
    let values = match parts[3] {
        "lin" => (0..count)
            .map(|i| {
                if count == 1 {
                    start
                } else {
                    start + (stop - start) * i as f64 / (count - 1) as f64
                }
            })
            .collect(),
        "log" => {
            if start <= 0.0 || stop <= 0.0 {
                return Err("log sweep needs positive endpoints".into());
            }
            (0..count)
                .map(|i| {
                    if count == 1 {
                        start
                    } else {
                        (start.ln() + (stop.ln() - start.ln()) * i as f64 / (count - 1) as f64)
                            .exp()
                    }
                })
                .collect()
        }
        other => return Err(format!("sweep scale {other:?} must be lin or log")),
    };
    Ok(Sweep {
        param: param.trim().to_string(),
        values,
    })
}
