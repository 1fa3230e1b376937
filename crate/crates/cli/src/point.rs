//! Command-line point syntax: x blocks separated by `|`, components within
//! a block separated by `,`, then `;` and the t components.
//!
//! Example for l = 2, m = 1: "1,0|0.5,0.5;0.3927".

use ccheis_core::{GroupPoint, GroupSpec};

pub fn parse(spec: &GroupSpec, text: &str) -> Result<GroupPoint, String> {
    let (x_part, t_part) = match text.split_once(';') {
        Some(pair) => pair,
        None => (text, ""),
    };
    let mut x = Vec::new();
    let block_texts: Vec<&str> = x_part.split('|').collect();
    if block_texts.len() != spec.ell() {
        return Err(format!(
            "point has {} x-blocks, spec needs {}",
            block_texts.len(),
            spec.ell()
        ));
    }
    for (blk, btext) in spec.blocks().iter().zip(&block_texts) {
        let comps: Vec<f64> = parse_list(btext)?;
        if comps.len() != 2 * blk.k {
            return Err(format!(
                "block with k = {} needs {} components, got {}",
                blk.k,
                2 * blk.k,
                comps.len()
            ));
        }
        x.extend(comps);
    }
    let t: Vec<f64> = if t_part.is_empty() {
        vec![0.0; spec.m()]
    } else {
        parse_list(t_part)?
    };
    if t.len() != spec.m() {
        return Err(format!("t has {} components, spec needs m = {}", t.len(), spec.m()));
    }
    Ok(GroupPoint::new(x, t))
}

fn parse_list(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad number {s:?}: {e}"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ccheis_core::new_spec;

    #[test]
    fn parses_single_block() {
        let spec = new_spec(&[(1.0, 1)], 1, &[0.0], None).unwrap();
        let g = parse(&spec, "1,0;0.3927").unwrap();
        assert_eq!(g.x, vec![1.0, 0.0]);
        assert_eq!(g.t, vec![0.3927]);
    }

    #[test]
    fn parses_two_blocks_default_t() {
        let spec = new_spec(&[(0.5, 1), (1.0, 1)], 1, &[0.0], None).unwrap();
        let g = parse(&spec, "1,0|0.5,0.5").unwrap();
        assert_eq!(g.x, vec![1.0, 0.0, 0.5, 0.5]);
        assert_eq!(g.t, vec![0.0]);
    }

    #[test]
    fn rejects_wrong_shapes() {
        let spec = new_spec(&[(1.0, 1)], 1, &[0.0], None).unwrap();
        assert!(parse(&spec, "1,0,0;0").is_err());
        assert!(parse(&spec, "1,0;0,0").is_err());
        assert!(parse(&spec, "1,0|1,0;0").is_err());
        assert!(parse(&spec, "1,zz;0").is_err());
    }
}
