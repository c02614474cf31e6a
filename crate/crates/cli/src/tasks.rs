use std::fs;
use std::path::PathBuf;

use nalgebra::DMatrix;
use pframe::cc::{
    cc_block_spectrum, cc_dilation, direct_sum_hamiltonian, ladder_commutator, truncation_defect, vertical_products,
    CCBlock, CCFamily,
};
use pframe::frame::{
    excess, naimark_dilate, parseval_defect, project_onb, riesz_pair_families, Branch, Frame, PARSEVAL_TOLERANCE,
    RANK_TOLERANCE,
};
use pframe::hamiltonian::{
    assemble, dense_spectrum, point_spectrum_certificate, quasi_eigenpair_check, riesz_split_assemble, Weights,
    EIGEN_RESIDUAL_TOLERANCE,
};
use pframe::io::{frame_from_json, frame_to_json};
use pframe::linalg::{
    hermitian_eigen, hermitian_norm, identity, max_abs_entry, numerical_rank, random_gaussian, random_projector,
    singular_values, spectral_norm, CMat,
};
use pframe::pseudo_boson::{
    build_families, hermite_states, ladder_phi, ladder_residuals, ladder_tilde, parseval_residual, split_hamiltonian,
    DiscretizationTolerance, Grid, GridFunction, WeightSpec, BIORTHOGONALITY_TOLERANCE, PARSEVAL_SLACK,
};
use pframe::{Surd, C};
use rand::rngs::StdRng;
use serde_json::{json, Value};

use crate::config::{
    CcLaddersConfig, CcSpectrumConfig, FrameInput, FrameVerifyConfig, NaimarkConfig, Prop15Config, PseudoBosonConfig,
    SpectrumConfig,
};
use crate::error::CliError;
use crate::report::{num, Checks, Output, Table};

/// Tolerance for secular roots against the dense spectrum.
const BLOCK_MATCH_TOLERANCE: f64 = 1e-9;
const DILATION_GRAM_TOLERANCE: f64 = 1e-12;
const SPLIT_TOLERANCE: f64 = 1e-10;
const CERTIFIED_DISTANCE: f64 = 1e-7;
const LADDER_ALGEBRA_TOLERANCE: f64 = 1e-14;
const RIESZ_PAIR_TOLERANCE: f64 = 1e-10;
const SPLIT_HAMILTONIAN_TOLERANCE: f64 = 1e-8;

pub struct Context {
    /// Directory of the config file; relative paths resolve against it.
    pub base: PathBuf,
    pub rng: StdRng,
}

fn load_frame(input: &FrameInput, ctx: &mut Context) -> Result<Frame<f64>, CliError> {
    match input {
        FrameInput::Path(p) => {
            let path = ctx.base.join(p);
            let text = fs::read_to_string(&path).map_err(CliError::io(&path))?;
            frame_from_json(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
        }
        FrameInput::Random { random } => {
            if random.dim == 0 || random.dim > random.len {
                return Err(CliError::Config(format!(
                    "random frame needs 1 <= dim <= len, got dim {} and len {}",
                    random.dim, random.len
                )));
            }
            Ok(project_onb(&random_projector::<f64, _>(
                random.len,
                random.dim,
                &mut ctx.rng,
            ))?)
        }
        FrameInput::Inline(file) => Ok(file.to_frame()?),
    }
}

pub fn frame_verify(cfg: &FrameVerifyConfig, ctx: &mut Context, checks: &mut Checks) -> Result<Output, CliError> {
    let frame = load_frame(&cfg.frame, ctx)?;
    let defect = parseval_defect(&frame);
    let rank = numerical_rank(frame.synthesis_matrix(), RANK_TOLERANCE);
    let (bounds, _) = hermitian_eigen(&frame.frame_operator());
    let norms = frame.norms();
    checks.holds("frame is complete", frame.dim() - rank.min(frame.dim()));
    if cfg.expect_parseval {
        checks.at_most("parseval defect", defect, PARSEVAL_TOLERANCE);
    }
    let mut table = Table::new(&["index", "label", "norm"]);
    for (j, (label, n)) in frame.labels().iter().zip(&norms).enumerate() {
        table.push(vec![j.to_string(), label.to_string(), num(*n)]);
    }
    Ok(Output {
        results: json!({
            "dim": frame.dim(),
            "len": frame.len(),
            "rank": rank,
            "parseval_defect": defect,
            "excess": excess(&frame).ok(),
            "lower_frame_bound": bounds.first(),
            "upper_frame_bound": bounds.last(),
        }),
        table: Some(table),
        attachments: Vec::new(),
    })
}

pub fn naimark(cfg: &NaimarkConfig, ctx: &mut Context, checks: &mut Checks) -> Result<Output, CliError> {
    let frame = load_frame(&cfg.frame, ctx)?;
    let ex = excess(&frame)?;
    let dil = naimark_dilate(&frame, &mut ctx.rng)?;
    let gram = dil.gram_defect();
    checks.at_most("dilated Gram matrix is the identity", gram, DILATION_GRAM_TOLERANCE);
    checks.holds("complement dimension equals excess", dil.m.abs_diff(ex));
    let complement_defect = (dil.m > 0).then(|| parseval_defect(&dil.psi));
    if let Some(d) = complement_defect {
        checks.at_most("complementary frame is Parseval", d, PARSEVAL_TOLERANCE);
    }
    let mut attachments = Vec::new();
    if dil.m > 0 {
        attachments.push(("complement", frame_to_json(&dil.psi)));
    }
    Ok(Output {
        results: json!({
            "dim": frame.dim(),
            "len": frame.len(),
            "excess": ex,
            "m": dil.m,
            "gram_defect": gram,
            "complement_parseval_defect": complement_defect,
        }),
        table: None,
        attachments,
    })
}

pub fn spectrum(cfg: &SpectrumConfig, ctx: &mut Context, checks: &mut Checks) -> Result<Output, CliError> {
    let frame = load_frame(&cfg.frame, ctx)?;
    let weights = Weights::new(cfg.e.clone())?;
    let h = assemble(&frame, &weights)?;
    let report = dense_spectrum(&h)?;
    let norm = h.norm();
    checks.at_most(
        "dense eigenpair residual relative to norm",
        report.max_residual() / norm.max(1.0),
        EIGEN_RESIDUAL_TOLERANCE,
    );
    let clusters = report.clusters(cfg.cluster_gap);
    let mut table = Table::new(&["mu", "multiplicity", "residual"]);
    for c in &clusters {
        table.push(vec![num(c.mu), c.multiplicity.to_string(), num(c.residual)]);
    }

    let mut results = json!({
        "dim": frame.dim(),
        "len": frame.len(),
        "norm": norm,
        "sup_abs_weight": weights.sup_abs(),
        "eigenvalues": report.eigenvalues,
        "residuals": report.residuals,
        "clusters": clusters.iter().map(|c| json!({
            "mu": c.mu, "multiplicity": c.multiplicity, "residual": c.residual,
        })).collect::<Vec<_>>(),
    });

    if cfg.certify {
        let mut certs = Vec::new();
        let mut missing = 0;
        for c in &clusters {
            match point_spectrum_certificate(&frame, &weights, c.mu)? {
                Some(cert) => certs.push(json!({
                    "mu": c.mu,
                    "present": true,
                    "defect_in_range": cert.defect_in_range,
                    "defect_orthogonal": cert.defect_orthogonal,
                    "smallest_singular_value": cert.smallest_singular_value,
                })),
                None => {
                    missing += 1;
                    certs.push(json!({ "mu": c.mu, "present": false }));
                }
            }
        }
        checks.holds("certificate for every eigenvalue", missing);
        results["certificates"] = Value::Array(certs);
    }

    if cfg.quasi_eigen {
        let dil = naimark_dilate(&frame, &mut ctx.rng)?;
        let mut rows = Vec::new();
        let mut unsupported = 0;
        for j in 0..frame.len() {
            let q = quasi_eigenpair_check(&dil, &weights, j)?;
            let e = weights.as_slice()[j];
            let nearest = report
                .eigenvalues
                .iter()
                .map(|l| (l - e).abs())
                .fold(f64::INFINITY, f64::min);
            if q.is_eigenpair && nearest > CERTIFIED_DISTANCE {
                unsupported += 1;
            }
            rows.push(json!({
                "index": j,
                "label": frame.labels()[j],
                "E": e,
                "is_eigenpair": q.is_eigenpair,
                "residual": q.residual,
                "eigen_residual": q.eigen_residual,
            }));
        }
        checks.holds("quasi-eigenvalues lie in the dense spectrum", unsupported);
        results["quasi_eigen"] = Value::Array(rows);
    }

    if let Some(j0) = &cfg.riesz_split {
        let j1: Vec<usize> = (0..frame.len()).filter(|j| !j0.contains(j)).collect();
        let split = riesz_split_assemble(&frame, &weights, j0, &j1)?;
        let diff = max_abs_entry(&(split.hamiltonian.matrix() - h.matrix())) / norm.max(1.0);
        checks.at_most("Riesz split reassembles H", diff, SPLIT_TOLERANCE);
        results["riesz_split"] = json!({
            "j0": j0,
            "j1": j1,
            "relative_difference": diff,
            "gram_condition": split.gram_condition,
            "complement_parseval_defect": split.complement_parseval_defect,
        });
    }

    Ok(Output {
        results,
        table: Some(table),
        attachments: Vec::new(),
    })
}

pub fn cc_spectrum(cfg: &CcSpectrumConfig, _ctx: &mut Context, checks: &mut Checks) -> Result<Output, CliError> {
    let specs = cfg.block_list()?;
    let blocks = specs
        .iter()
        .map(|b| CCBlock::new(b.n, b.e.clone()))
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&["block", "lambda", "type", "residual"]);
    let mut per_block = Vec::new();
    let (mut mismatch, mut interlace_violations, mut top_missed, mut interior_flagged) = (0.0f64, 0, 0, 0);
    let mut all_eigenvalues = Vec::new();
    for (b, block) in blocks.iter().enumerate() {
        let n = block.n();
        let e = block.e();
        let sp = cc_block_spectrum(block)?;
        for p in &sp.pairs {
            table.push(vec![
                b.to_string(),
                num(p.lambda),
                p.kind.as_str().into(),
                num(p.residual),
            ]);
        }
        for (j, &mu) in sp.secular.roots.iter().enumerate() {
            if !(e[j] < mu && mu < e[j + 1]) {
                interlace_violations += 1;
            }
        }
        let mut ours = sp.eigenvalues();
        ours.sort_by(f64::total_cmp);
        let dense = dense_spectrum(&block.hamiltonian())?.eigenvalues;
        let block_mismatch = ours.iter().zip(&dense).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        mismatch = mismatch.max(block_mismatch);
        all_eigenvalues.extend_from_slice(&ours);

        let dil = cc_dilation::<f64>(n)?;
        let w = block.weights();
        let top = quasi_eigenpair_check(&dil, &w, n)?;
        if !top.is_eigenpair {
            top_missed += 1;
        }
        let mut interior = Vec::new();
        for j in 0..n {
            let q = quasi_eigenpair_check(&dil, &w, j)?;
            if n >= 2 && q.is_eigenpair {
                interior_flagged += 1;
            }
            interior.push(q.is_eigenpair);
        }
        per_block.push(json!({
            "block": b,
            "n": n,
            "E": e,
            "secular_roots": sp.secular.roots,
            "secular_scaled_residuals": sp.secular.scaled_residuals,
            "eigenpairs": sp.pairs.iter().map(|p| json!({
                "lambda": p.lambda,
                "type": p.kind.as_str(),
                "residual": p.residual,
                "relative_residual": p.relative_residual,
            })).collect::<Vec<_>>(),
            "dense_eigenvalues": dense,
            "dense_mismatch": block_mismatch,
            "top_is_quasi_eigen": top.is_eigenpair,
            "interior_is_quasi_eigen": interior,
        }));
    }
    checks.at_most("secular roots match dense spectrum", mismatch, BLOCK_MATCH_TOLERANCE);
    checks.holds("secular roots interlace the weights", interlace_violations);
    checks.holds("top weight is a quasi-eigenvalue", top_missed);
    checks.holds("interior weights are not quasi-eigenvalues", interior_flagged);

    let mut results = json!({ "blocks": per_block });
    if blocks.len() > 1 {
        let family = CCFamily::new(blocks.clone())?;
        let h = direct_sum_hamiltonian(&family, blocks.len())?;
        let dense = dense_spectrum(&h)?.eigenvalues;
        all_eigenvalues.sort_by(f64::total_cmp);
        let diff = all_eigenvalues
            .iter()
            .zip(&dense)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        checks.at_most(
            "direct sum spectrum is the union of block spectra",
            diff,
            BLOCK_MATCH_TOLERANCE,
        );
        results["direct_sum"] = json!({ "dim": h.dim(), "eigenvalues": dense, "mismatch": diff });
    }
    Ok(Output {
        results,
        table: Some(table),
        attachments: Vec::new(),
    })
}

fn surd_max_abs(m: &DMatrix<Surd>) -> f64 {
    m.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
}

pub fn cc_ladders(cfg: &CcLaddersConfig, _ctx: &mut Context, checks: &mut Checks) -> Result<Output, CliError> {
    if cfg.n_max == 0 {
        return Err(CliError::Config("n_max must be at least 1".into()));
    }
    let mut table = Table::new(&["n", "commutator_exact", "commutator_f64", "vv_defect", "vtv_rank"]);
    let (mut exact_worst, mut float_worst, mut vv_worst, mut rank_violations) = (0.0f64, 0.0f64, 0.0f64, 0);
    for n in 1..=cfg.n_max {
        let exact = if n <= cfg.exact_max {
            let d = surd_max_abs(&(ladder_commutator::<Surd>(n)? - truncation_defect::<Surd>(n)?));
            exact_worst = exact_worst.max(d);
            Some(d)
        } else {
            None
        };
        let float = (ladder_commutator::<f64>(n)? - truncation_defect::<f64>(n)?)
            .abs()
            .max();
        float_worst = float_worst.max(float);
        let (vv, vtv) = vertical_products::<f64>(n)?;
        let vv_defect = (vv - DMatrix::<f64>::identity(n, n)).abs().max();
        vv_worst = vv_worst.max(vv_defect);
        let rank = numerical_rank(&vtv.map(|x| C::new(x, 0.0)), RANK_TOLERANCE);
        if rank != n {
            rank_violations += 1;
        }
        table.push(vec![
            n.to_string(),
            exact.map(num).unwrap_or_default(),
            num(float),
            num(vv_defect),
            rank.to_string(),
        ]);
    }
    if cfg.exact_max > 0 {
        checks.at_most(
            "commutator equals I - n P_n (exact)",
            exact_worst,
            LADDER_ALGEBRA_TOLERANCE,
        );
    }
    checks.at_most("V V* is the identity", vv_worst, LADDER_ALGEBRA_TOLERANCE);
    checks.holds("V* V has rank n", rank_violations);
    Ok(Output {
        results: json!({
            "n_max": cfg.n_max,
            "exact_max": cfg.exact_max.min(cfg.n_max),
            "commutator_exact_max_defect": exact_worst,
            "commutator_f64_max_defect": float_worst,
            "vv_max_defect": vv_worst,
        }),
        table: Some(table),
        attachments: Vec::new(),
    })
}

fn gaussian_mixture(g: &Grid<f64>) -> Result<GridFunction<f64>, CliError> {
    let f = GridFunction::from_fn(*g, |x| {
        C::new(
            (-(x - 1.0) * (x - 1.0)).exp() + 0.5 * (-(x + 2.0) * (x + 2.0) / 2.0).exp(),
            0.0,
        )
    })?;
    let n = f.norm();
    Ok(f.scale(C::new(1.0 / n, 0.0)))
}

pub fn pseudo_boson(cfg: &PseudoBosonConfig, _ctx: &mut Context, checks: &mut Checks) -> Result<Output, CliError> {
    if cfg.order == 0 {
        return Err(CliError::Config("N must be at least 1".into()));
    }
    let grid = Grid::new(cfg.grid.half_width, cfg.grid.points)?;
    let spec = WeightSpec::new(cfg.m.to_profile(), cfg.alpha_cells, grid)?;
    let fam = build_families(&spec, cfg.order)?;
    let (bio_phi, bio_tilde) = fam.biorthogonality_defects();
    checks.at_most("biorthogonality", bio_phi.max(bio_tilde), BIORTHOGONALITY_TOLERANCE);

    let mut probes: Vec<(String, GridFunction<f64>)> = vec![
        ("hermite_0".into(), fam.hermite[0].clone()),
        (format!("hermite_{}", cfg.order - 1), fam.hermite[cfg.order - 1].clone()),
        (
            "shifted_vacuum".into(),
            hermite_states(1, &grid, cfg.alpha_cells)?.pop().expect("one state"),
        ),
        ("gaussian_mixture".into(), gaussian_mixture(&grid)?),
    ];
    if cfg.order > 2 {
        let mid = cfg.order / 2;
        probes.insert(1, (format!("hermite_{mid}"), fam.hermite[mid].clone()));
    }
    let mut parseval = Vec::new();
    let mut excess_over_bound = f64::NEG_INFINITY;
    for (name, f) in &probes {
        let r = parseval_residual(&fam, f)?;
        excess_over_bound = excess_over_bound.max(r.residual - r.tail_bound);
        parseval.push(json!({
            "probe": name,
            "residual": r.residual,
            "tail_bound": r.tail_bound,
            "captured_energy": r.captured_energy,
            "norm_squared": r.norm_squared,
        }));
    }
    checks.at_most("parseval residual within tail bound", excess_over_bound, PARSEVAL_SLACK);

    let phi_ops = ladder_phi(&spec)?;
    let tilde_ops = ladder_tilde(&spec)?;
    let rows = ladder_residuals(&fam, &phi_ops, &tilde_ops);
    let tol_disc = DiscretizationTolerance::calibrate(&grid, cfg.alpha_cells, cfg.order)?;
    let mut table = Table::new(&["n", "a_phi", "b_phi", "a_tilde", "b_tilde", "tol_disc"]);
    let mut worst_ratio = 0.0f64;
    for r in &rows {
        let t = tol_disc.at(r.n);
        // A zero tolerance only arises when the calibration residuals vanish.
        let ratio = if t > 0.0 { r.max() / t } else { 0.0 };
        worst_ratio = worst_ratio.max(ratio);
        table.push(vec![
            r.n.to_string(),
            num(r.a_phi),
            num(r.b_phi),
            num(r.a_tilde),
            num(r.b_tilde),
            num(t),
        ]);
    }
    if !rows.is_empty() {
        checks.at_most("ladder residuals within tol_disc", worst_ratio, 1.0);
    }

    let phi0_lowering = phi_ops.apply_a(&fam.phi[0]).norm() / fam.phi[0].norm();
    let mut results = json!({
        "grid": { "L": grid.half_width(), "P": grid.points(), "h": grid.spacing() },
        "alpha": spec.alpha(),
        "weight_bounds": spec.bounds(),
        "derivative_source": spec.profile().derivative_source().as_str(),
        "biorthogonality": { "phi": bio_phi, "tilde": bio_tilde },
        "hermite_defect": fam.hermite_defect(),
        "cross_overlap": fam.cross_overlap(),
        "phi0_lowering_residual": phi0_lowering,
        "parseval": parseval,
        "tol_disc": {
            "constant": tol_disc.constant,
            "spacing": tol_disc.spacing,
            "safety": tol_disc.safety,
        },
        "ladder_max_ratio_to_tol_disc": worst_ratio,
    });

    if cfg.two_grid {
        let fine_spec = spec.refined()?;
        let fine = build_families(&fine_spec, cfg.order)?;
        let fine_rows = ladder_residuals(&fine, &ladder_phi(&fine_spec)?, &ladder_tilde(&fine_spec)?);
        let ratios: Vec<Value> = rows
            .iter()
            .zip(&fine_rows)
            .map(|(c, f)| {
                json!({
                    "n": c.n,
                    "a_phi": c.a_phi / f.a_phi,
                    "b_phi": c.b_phi / f.b_phi,
                    "a_tilde": c.a_tilde / f.a_tilde,
                    "b_tilde": c.b_tilde / f.b_tilde,
                })
            })
            .collect();
        results["two_grid_ratios"] = Value::Array(ratios);
    }

    if let Some(hw) = &cfg.hamiltonian {
        let split = split_hamiltonian(&fam, hw.e_phi.clone(), hw.e_tilde.clone())?;
        let c = split.consistency();
        let scale = hw
            .e_phi
            .iter()
            .chain(&hw.e_tilde)
            .fold(1.0f64, |acc, e| acc.max(e.abs()));
        checks.at_most(
            "H1 maps dual vectors onto weighted frame vectors",
            c.dual_eigen_defect / scale,
            SPLIT_HAMILTONIAN_TOLERANCE,
        );
        checks.at_most(
            "split Hamiltonian is Hermitian on the span",
            c.hermiticity_defect,
            SPLIT_HAMILTONIAN_TOLERANCE,
        );
        results["hamiltonian"] = json!({
            "dual_eigen_defect": c.dual_eigen_defect,
            "dual_matrix_defect": c.dual_matrix_defect,
            "hermiticity_defect": c.hermiticity_defect,
        });
    }

    Ok(Output {
        results,
        table: Some(table),
        attachments: Vec::new(),
    })
}

fn prop15_matrix(cfg: &Prop15Config, ctx: &mut Context) -> Result<CMat<f64>, CliError> {
    match (&cfg.x, &cfg.random) {
        (Some(rows), None) => {
            let d = rows.len();
            if d == 0 || rows.iter().any(|r| r.len() != d) {
                return Err(CliError::Config(
                    "`x` must be a non-empty square matrix given by rows".into(),
                ));
            }
            Ok(CMat::from_fn(d, d, |r, c| rows[r][c].value()))
        }
        (None, Some(spec)) => {
            if spec.dim == 0 || spec.norm.is_nan() || spec.norm <= 0.0 || spec.norm == 1.0 {
                return Err(CliError::Config(
                    "random matrix needs dim >= 1 and a positive norm other than 1".into(),
                ));
            }
            let shifted =
                random_gaussian::<f64, _>(spec.dim, spec.dim, &mut ctx.rng) + identity::<f64>(spec.dim).scale(3.0);
            let scale = if spec.norm < 1.0 {
                spectral_norm(&shifted) / spec.norm
            } else {
                let smallest = singular_values(&shifted).into_iter().fold(f64::INFINITY, f64::min);
                smallest / spec.norm
            };
            Ok(shifted.unscale(scale))
        }
        _ => Err(CliError::Config("prop15 needs exactly one of `x` and `random`".into())),
    }
}

pub fn prop15(cfg: &Prop15Config, ctx: &mut Context, checks: &mut Checks) -> Result<Output, CliError> {
    let x = prop15_matrix(cfg, ctx)?;
    let fam = riesz_pair_families(&x)?;
    let (riesz, complement) = fam.biorthogonality_defects();
    let union = fam.union();
    let defect = parseval_defect(&union);
    let ex = excess(&union)?;
    checks.at_most("Riesz families are biorthogonal", riesz, RIESZ_PAIR_TOLERANCE);
    checks.at_most("complement families are biorthogonal", complement, RIESZ_PAIR_TOLERANCE);
    checks.at_most("union is a Parseval frame", defect, PARSEVAL_TOLERANCE);
    checks.holds("union has excess d", ex.abs_diff(x.nrows()));
    let sv = singular_values(&x);
    Ok(Output {
        results: json!({
            "dim": x.nrows(),
            "branch": match fam.branch {
                Branch::Contractive => "contractive",
                Branch::Expansive => "expansive",
            },
            "singular_values": sv,
            "x_norm": hermitian_norm(&x.ad_mul(&x)).sqrt(),
            "biorthogonality": { "riesz": riesz, "complement": complement },
            "union_parseval_defect": defect,
            "union_excess": ex,
        }),
        table: None,
        attachments: vec![("union", frame_to_json(&union))],
    })
}
