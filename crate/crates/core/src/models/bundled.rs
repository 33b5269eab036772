//! Reference environments shipped with the crate (see `crates/core/models/`).

use super::config::{parse_model, Model};

macro_rules! bundled {
    ($($fn_name:ident => $file:literal),* $(,)?) => {
        $(
            pub fn $fn_name() -> Model {
                parse_model(include_str!(concat!("../../models/", $file)))
                    .expect(concat!("bundled model ", $file))
            }
        )*

        /// `(file name, model)` for every bundled environment.
        pub fn all() -> Vec<(&'static str, Model)> {
            vec![$(($file, $fn_name())),*]
        }
    };
}

bundled! {
    strongly_subcritical => "strongly_subcritical.toml",
    critical => "critical.toml",
    supercritical => "supercritical.toml",
    galton_watson_half => "galton_watson_half.toml",
    heavy_supercritical => "heavy_supercritical.toml",
    deep_tail => "deep_tail.toml",
}

/// Environments used for the two-algorithm and property checks.
pub fn rate_test_envs() -> Vec<Model> {
    vec![strongly_subcritical(), critical(), supercritical()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::Regime;

    #[test]
    fn bundled_models_parse_with_expected_regimes() {
        assert_eq!(
            strongly_subcritical().env.classify(),
            Regime::StronglySubcritical
        );
        assert_eq!(critical().env.classify(), Regime::Critical);
        assert_eq!(supercritical().env.classify(), Regime::Supercritical);
        assert_eq!(heavy_supercritical().env.classify(), Regime::Supercritical);
        assert_eq!(all().len(), 6);
        let c = strongly_subcritical();
        let means: Vec<f64> = c.env.log_means().iter().map(|x| x.exp()).collect();
        assert!((means[0] - 0.25).abs() < 1e-15 && (means[1] - 1.5).abs() < 1e-15);
    }
}
