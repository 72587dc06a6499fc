//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;

use psivar::conjclass::split_correspondence;
use psivar::cyclo::Cyclo8;
use psivar::endoscopy::*;
use psivar::etale::{enumerate_c_classes, ClassDatum, DatumKind};
use psivar::localfield::*;
use psivar::lparam::*;
use psivar::spinor::*;
use psivar::verify::*;

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome { ok: true, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome { ok: false, detail: detail.into() }
}

/// Runs `f`, turning panics and errors into failures.
fn guarded(f: impl FnOnce() -> psivar::Result<Outcome> + std::panic::UnwindSafe) -> Outcome {
    match std::panic::catch_unwind(f) {
        Ok(Ok(o)) => o,
        Ok(Err(e)) => fail(format!("error: {e}")),
        Err(_) => fail("panicked"),
    }
}

fn budget(o: Outcome, elapsed: Duration, limit: Duration) -> Outcome {
    let detail = format!("{}; {:.2}s (budget {}s)", o.detail, elapsed.as_secs_f64(), limit.as_secs());
    if elapsed > limit {
        fail(detail)
    } else {
        Outcome { ok: o.ok, detail }
    }
}

const TIER1_FIELDS: [LocalField; 5] =
    [LocalField::Real, LocalField::PAdic(2), LocalField::PAdic(3), LocalField::PAdic(5), LocalField::PAdic(7)];
const ODD: [LocalField; 3] = [LocalField::PAdic(3), LocalField::PAdic(5), LocalField::PAdic(7)];

fn criterion_1() -> psivar::Result<Outcome> {
    let mut checked = 0;
    let fields = [
        LocalField::Real,
        LocalField::PAdic(2),
        LocalField::PAdic(3),
        LocalField::PAdic(5),
        LocalField::PAdic(7),
        LocalField::PAdic(13),
    ];
    for f in fields {
        for a in f.square_classes() {
            for b in f.square_classes() {
                let (x, y) = (a.rep_q(), b.rep_q());
                let oracle = hilbert_symbol_oracle(f, &x, &y, oracle_default_depth(f, &x, &y))?;
                if oracle != hilbert_symbol(&a, &b) {
                    return Ok(fail(format!("({a}, {b}) over {f}")));
                }
                checked += 1;
            }
        }
    }
    Ok(pass(format!("{checked} pairs")))
}

fn so_class(rng: &mut impl Rng, d: &ClassDatum) -> psivar::Result<ClassDatum> {
    let so = enumerate_c_classes(d, DatumKind::So)?;
    Ok(so[rng.random_range(0..so.len())].clone())
}

fn criterion_2() -> psivar::Result<Outcome> {
    let mut rng = case_rng(0xA2);
    let (mut cases, mut tier2) = (0, 0);
    for i in 0..200 {
        let f = TIER1_FIELDS[i % 5];
        let d = gen_stable_datum(&mut rng, f, 1 + (i / 5) % 4, TierPolicy::One)?;
        let so = so_class(&mut rng, &d)?;
        if spinor_norm_oracle(&so)? != spinor_norm_formula(&so)? {
            return Ok(fail(d.digest()));
        }
        cases += 1;
    }
    for i in 0..120 {
        let d = gen_stable_datum(&mut rng, ODD[i % 3], 2 + (i / 3) % 3, TierPolicy::Two)?;
        tier2 += usize::from(d.max_tier() == 2);
        let so = so_class(&mut rng, &d)?;
        if spinor_norm_oracle(&so)? != spinor_norm_formula(&so)? {
            return Ok(fail(d.digest()));
        }
        cases += 1;
    }
    if tier2 < 100 {
        return Ok(fail(format!("only {tier2} tier-2 data generated")));
    }
    Ok(pass(format!("{cases} data ({tier2} with tier-2 factors)")))
}

fn criterion_3() -> psivar::Result<Outcome> {
    let mut rng = case_rng(0xA3);
    let mut classes = 0;
    for i in 0..120 {
        let f = TIER1_FIELDS[i % 5];
        let policy = if i % 2 == 0 { TierPolicy::One } else { TierPolicy::Both };
        let d = gen_stable_datum(&mut rng, f, 1 + i % 3, policy)?;
        let stable = spinor_norm_oracle(&d)?;
        for so in enumerate_c_classes(&d, DatumKind::So)? {
            if spinor_norm_oracle(&so)? != stable {
                return Ok(fail(so.digest()));
            }
            classes += 1;
        }
    }
    Ok(pass(format!("120 stable data, {classes} c-classes")))
}

fn criterion_4() -> psivar::Result<Outcome> {
    let fields = [
        LocalField::Real,
        LocalField::Complex,
        LocalField::PAdic(2),
        LocalField::PAdic(3),
        LocalField::PAdic(5),
        LocalField::PAdic(7),
    ];
    let pairs: Vec<(usize, usize)> = (1..=4).flat_map(|n| (0..=n).map(move |k| (k, n - k))).collect();
    let mut rng = case_rng(0xA4);
    let (mut cases, mut tier2) = (0, 0);
    let mut covered = BTreeSet::new();
    for i in 0..600 {
        let f = fields[i % fields.len()];
        let (n1, n2) = pairs[(i / fields.len()) % pairs.len()];
        let policy = if i % 2 == 0 { TierPolicy::Both } else { TierPolicy::Two };
        let (d, part) = gen_targeted(&mut rng, f, n1, n2, policy)?;
        tier2 += usize::from(d.max_tier() == 2);
        let corr = split_correspondence(&d, &part, None)?;
        for c in f.square_classes() {
            let v = variation_signs(&d, &part, &c.rep_q())?;
            if !(v.master_holds() && v.var0_holds() && v.var1_holds()) {
                return Ok(fail(format!("{} at c = {c}", d.digest())));
            }
            if !check_delta_var_1(&corr.gamma_double_prime, &c.rep_q())? {
                return Ok(fail(format!("var-1 at {} c = {c}", d.digest())));
            }
            cases += 1;
        }
        covered.insert((n1, n2));
    }
    if covered.len() != pairs.len() || tier2 == 0 {
        return Ok(fail(format!("coverage: {} of {} data, {tier2} tier-2", covered.len(), pairs.len())));
    }
    Ok(pass(format!("600 data, {cases} (datum, c) cases, {} (n′,n″) pairs, {tier2} tier-2", covered.len())))
}

fn criterion_5() -> psivar::Result<Outcome> {
    let mut rng = case_rng(0xA5);
    let (mut ram, mut unram) = (0, 0);
    for i in 0..240 {
        let f = ODD[i % 3];
        let disc = f.parse_class(["u", "p", "up"][(i / 3) % 3])?;
        let e = ExtField::new(f, &disc)?;
        let c = f.square_classes()[rng.random_range(0..4)];
        let y = random_ext_element(&mut rng, &e);
        let lhs = ext_hilbert_symbol(&e, &e.from_rational(c.rep_q()), &y)?;
        if lhs != hilbert_symbol_q(f, &c.rep_q(), &ext_norm(&y))? {
            return Ok(fail(format!("E = {f}(√{disc}), c = {c}")));
        }
        if e.is_ramified() {
            ram += 1;
        } else {
            unram += 1;
        }
    }
    Ok(pass(format!("{} cases ({ram} ramified, {unram} unramified)", ram + unram)))
}

fn criterion_6() -> psivar::Result<Outcome> {
    let mut rng = case_rng(0xA6);
    let mut checks = 0;
    for f in [LocalField::Real, LocalField::PAdic(3), LocalField::PAdic(5)] {
        let classes = f.square_classes();
        for _ in 0..60 {
            let phi = gen_parameter(&mut rng, f, 6, 3, false);
            for a in &classes {
                let psi = AdditiveCharacter { scale: *a };
                for c in &classes {
                    let d = delta_c(&phi, c, &psi)?;
                    if d.len() != phi.i_plus().len() {
                        return Ok(fail(format!("δ has wrong length for {phi}")));
                    }
                    // another representative of the same class
                    let t = random_rational(&mut rng, 9);
                    let c_alt = square_class(f, &(c.rep_q() * &t * &t))?;
                    if delta_c(&phi, &c_alt, &psi)? != d
                        || delta_c(&phi, c, &AdditiveCharacter::standard(f))? != d
                    {
                        return Ok(fail(format!("δ_{c} not well defined for {phi}")));
                    }
                    for c2 in &classes {
                        let rhs = d.mul(&delta_c(&phi.twist(c), c2, &psi.rescale(c))?)?;
                        if delta_c(&phi, &(*c * *c2), &psi)? != rhs {
                            return Ok(fail(format!("cocycle at ({c}, {c2}) for {phi}")));
                        }
                        checks += 1;
                    }
                }
            }
        }
    }
    Ok(pass(format!("180 parameters, {checks} cocycle checks")))
}

fn criterion_7() -> psivar::Result<Outcome> {
    let mut rng = case_rng(0xA7);
    let mut count = 0;
    for i in 0..150 {
        let f = TIER1_FIELDS[i % 5];
        let phi = gen_parameter(&mut rng, f, 3, 3, false);
        for s in enumerate_s_elements(&centralizer_shape(&phi)) {
            let e = epsilon_minus_eigenspace(&phi, &s, &AdditiveCharacter::standard(f))?;
            for a in f.square_classes() {
                if epsilon_minus_eigenspace(&phi, &s, &AdditiveCharacter { scale: a })? != e {
                    return Ok(fail(format!("{phi} depends on ψ")));
                }
            }
            count += 1;
        }
    }
    Ok(pass(format!("150 parameters, {count} involutions")))
}

fn criterion_8() -> psivar::Result<Outcome> {
    let mut rng = case_rng(0xA8);
    let mut count = 0;
    for i in 0..150 {
        let f = [LocalField::Real, LocalField::Complex, LocalField::PAdic(2), LocalField::PAdic(3), LocalField::PAdic(5)][i % 5];
        let phi = gen_parameter(&mut rng, f, 3, 3, true);
        let shape = centralizer_shape(&phi);
        if shape.component_group_order() != 1 << phi.i_plus().len() {
            return Ok(fail(format!("|Ş| for {phi}")));
        }
        let mut images = BTreeSet::new();
        for s in enumerate_s_elements(&shape) {
            images.insert(image_in_component_group(&shape, &s)?.to_mask());
            if endoscopic_datum_of(&phi, &s)?.n() != phi.n() as usize {
                return Ok(fail(format!("n′ + n″ for {phi}")));
            }
            count += 1;
        }
        if images.len() != shape.component_group_order() {
            return Ok(fail(format!("not surjective for {phi}")));
        }
    }
    Ok(pass(format!("150 parameters, {count} involutions")))
}

fn criterion_9() -> psivar::Result<Outcome> {
    let mut rng = case_rng(0xA9);
    for rank in 0..=4usize {
        for _ in 0..40 {
            let coeffs = (0..1usize << rank)
                .map(|_| Cyclo8::new(std::array::from_fn(|_| random_rational(&mut rng, 20))))
                .collect();
            let pi = FormalPacketDistribution { rank, side: FourierSide::Pi, coeffs };
            let t = luo_fourier(&pi, FourierDirection::Forward)?;
            if luo_fourier(&t, FourierDirection::Inverse)? != pi {
                return Ok(fail(format!("round trip at rank {rank}")));
            }
        }
    }
    let mut twists = 0;
    for i in 0..120 {
        let f = [LocalField::Real, LocalField::PAdic(2), LocalField::PAdic(3), LocalField::PAdic(5)][i % 4];
        let phi = gen_parameter(&mut rng, f, 4, 3, false);
        let k = phi.i_plus().len();
        let chi = SignVector((0..k).map(|_| Sign::from_bool(rng.random_bool(0.5))).collect());
        let cl = f.square_classes();
        let psi = AdditiveCharacter { scale: cl[rng.random_range(0..cl.len())] };
        let e = EnhancedParameter::new(phi, chi, psi)?;
        let (c, c2) = (cl[rng.random_range(0..cl.len())], cl[rng.random_range(0..cl.len())]);
        if twist_enhanced(&twist_enhanced(&e, &c)?, &c2)? != twist_enhanced(&e, &(c * c2))? {
            return Ok(fail(format!("composition at ({c}, {c2}) for {}", e.parameter)));
        }
        twists += 1;
    }
    Ok(pass(format!("200 round trips, {twists} twist compositions")))
}

fn criterion_10() -> psivar::Result<Outcome> {
    let run = |args: &[&str]| Command::new(env!("CARGO_BIN_EXE_psivar")).args(args).output().expect("binary runs");
    for seed in ["7", "20261015"] {
        for json in [false, true] {
            let mut args = vec!["verify", "--suite", "all", "--seed", seed];
            if json {
                args.insert(0, "--json");
            }
            let (a, b) = (run(&args), run(&args));
            if a.stdout != b.stdout || a.status.code() != b.status.code() || a.stdout.is_empty() {
                return Ok(fail(format!("seed {seed} json={json} differs")));
            }
        }
    }
    Ok(pass("2 seeds × text/json, byte-identical"))
}

fn main() {
    let criteria: [(u32, fn() -> psivar::Result<Outcome>, Option<u64>); 10] = [
        (1, criterion_1, Some(10)),
        (2, criterion_2, Some(60)),
        (3, criterion_3, None),
        (4, criterion_4, None),
        (5, criterion_5, None),
        (6, criterion_6, None),
        (7, criterion_7, None),
        (8, criterion_8, None),
        (9, criterion_9, None),
        (10, criterion_10, None),
    ];
    let mut failed = 0;
    for (n, f, limit) in criteria {
        let start = Instant::now();
        let mut o = guarded(f);
        o = match limit {
            Some(l) => budget(o, start.elapsed(), Duration::from_secs(l)),
            None => Outcome { detail: format!("{}; {:.2}s", o.detail, start.elapsed().as_secs_f64()), ..o },
        };
        failed += usize::from(!o.ok);
        println!("criterion {n}: {} ({})", if o.ok { "PASS" } else { "FAIL" }, o.detail);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
