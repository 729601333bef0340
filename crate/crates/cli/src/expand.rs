//! Brace expansion for sweep grids: `poisson:lambda={25,100}` becomes
//! `poisson:lambda=25` and `poisson:lambda=100`.

use crate::error::CliError;

pub fn expand(spec: &str) -> Result<Vec<String>, CliError> {
    let Some(open) = spec.find('{') else {
        if spec.contains('}') {
            return Err(CliError::Usage(format!("unbalanced `}}` in `{spec}`")));
        }
        return Ok(vec![spec.to_string()]);
    };
    let close = spec[open..]
        .find('}')
        .map(|i| open + i)
        .ok_or_else(|| CliError::Usage(format!("unbalanced `{{` in `{spec}`")))?;
    let body = &spec[open + 1..close];
    if body.contains('{') {
        return Err(CliError::Usage(format!("nested braces in `{spec}`")));
    }
    let (head, tail) = (&spec[..open], &spec[close + 1..]);
    let mut out = Vec::new();
    for choice in body.split(',') {
        let choice = choice.trim();
        if choice.is_empty() {
            return Err(CliError::Usage(format!("empty choice in `{spec}`")));
        }
        for rest in expand(tail)? {
            out.push(format!("{head}{choice}{rest}"));
        }
    }
    Ok(out)
}

pub fn expand_all(specs: &[String]) -> Result<Vec<String>, CliError> {
    let mut out = Vec::new();
    for s in specs {
        out.extend(expand(s)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_spec_is_kept() {
        assert_eq!(expand("twopoint:x0=-1,x1=1,p=0.5").unwrap(), vec!["twopoint:x0=-1,x1=1,p=0.5"]);
    }

    #[test]
    fn cartesian_in_order() {
        assert_eq!(
            expand("binomial:n={10,20},p={0.1,0.5}").unwrap(),
            vec!["binomial:n=10,p=0.1", "binomial:n=10,p=0.5", "binomial:n=20,p=0.1", "binomial:n=20,p=0.5"]
        );
    }

    #[test]
    fn malformed_braces() {
        assert!(expand("poisson:lambda={1,2").is_err());
        assert!(expand("poisson:lambda=1}").is_err());
        assert!(expand("poisson:lambda={1,,2}").is_err());
    }
}
