use super::jt::{cokernel_order_jt, JtResult};
use super::report::{HypothesisStatus, Prediction, PrimeResult, Verdict, VerificationReport};
use super::CurveContext;
use crate::arith;
use crate::ec::{sp_and_b2, trace_of_frobenius};
use crate::error::Result;
use crate::group_ring::{filtration, LeadingImage, RationalElement};
use crate::linalg::rational::Q;
use crate::theta::{build_theta, cascade_factor, p_split, theta_p_part, ThetaElement, MAX_GROUP_ORDER};
use num_bigint::BigInt;
use num_traits::Zero;

/// theta_S when G_S is small enough, and its augmentation either way.
struct ThetaData {
    direct: Option<ThetaElement>,
    augmentation: Q,
    aug_route: &'static str,
}

fn theta_data(ctx: &CurveContext, s: u64) -> Result<ThetaData> {
    if arith::euler_phi(s) <= MAX_GROUP_ORDER {
        let t = build_theta(&ctx.eig, ctx.label(), s)?;
        let augmentation = t.element.augmentation();
        return Ok(ThetaData { direct: Some(t), augmentation, aug_route: "direct" });
    }
    let (p, m) = ctx.eig.eval(0, 1)?;
    let f = cascade_factor(&ctx.profile.curve, s)?;
    Ok(ThetaData {
        direct: None,
        augmentation: (p + m) * Q::from_integer(BigInt::from(f)),
        aug_route: "norm cascade",
    })
}

fn prime_image(ctx: &CurveContext, data: &ThetaData, s: u64, p: u64) -> Result<(RationalElement, &'static str)> {
    if let Some(t) = &data.direct {
        return Ok((theta_p_part(&t.element, p).1, "direct"));
    }
    let (s1, s2) = p_split(s, p);
    let base = ctx.sylow_base(s1, p)?;
    Ok((base.extend(&ctx.profile.curve, s2)?, "sylow"))
}

/// Per-prime membership in Z_(p) tensor I^t. Returns false when some checked
/// prime fails.
fn membership_block(
    ctx: &CurveContext,
    data: &ThetaData,
    s: u64,
    t: usize,
    cap: usize,
    rep: &mut VerificationReport,
) -> Result<bool> {
    let aug_zero = data.augmentation.is_zero();
    rep.augmentation = Some(data.augmentation.to_string());
    rep.witnesses.push(format!("augmentation {} ({})", data.augmentation, data.aug_route));
    let mut all = true;
    let mut ord_found = if aug_zero { cap } else { 0 };
    if t >= 1 && !aug_zero {
        all = false;
    }
    let order = arith::euler_phi(s);
    for p in arith::prime_divisors(order) {
        if ctx.spec.is_inverted(p) {
            continue;
        }
        if p > ctx.spec.p_bound {
            rep.unchecked_primes.push(p);
            continue;
        }
        let (img, route) = match prime_image(ctx, data, s, p) {
            Ok(x) => x,
            Err(e) => {
                rep.unchecked_primes.push(p);
                rep.per_prime.insert(
                    p,
                    PrimeResult { member: None, ord: None, route: "unchecked".into(), note: Some(e.to_string()) },
                );
                continue;
            }
        };
        let (d, xi) = img.clear_denominators();
        if (&d % BigInt::from(p)).is_zero() {
            all = false;
            ord_found = 0;
            rep.per_prime.insert(
                p,
                PrimeResult {
                    member: Some(false),
                    ord: None,
                    route: route.into(),
                    note: Some(format!("image not p-integral (denominator {d})")),
                },
            );
            continue;
        }
        let member = filtration::contains_p_local(&xi, t, p);
        let ord = filtration::ord_aug_p(&xi, p, cap);
        all &= member;
        ord_found = ord_found.min(ord.lower_bound());
        rep.per_prime.insert(p, PrimeResult { member: Some(member), ord: Some(ord), route: route.into(), note: None });
    }
    if t >= 1 {
        rep.witnesses.push(format!(
            "non-inverted primes not dividing |G_S| = {order}: membership in I^{t} iff augmentation is 0"
        ));
    }
    rep.ord_found = Some(ord_found);
    if let Some(th) = &data.direct {
        let inverted_only = th.denominator_primes.iter().all(|q| ctx.spec.is_inverted(*q));
        if !inverted_only {
            all = false;
            rep.witnesses.push(format!("denominator primes {:?} not all inverted", th.denominator_primes));
        }
        let (_, xi) = th.element.clear_denominators();
        rep.exact_member = Some(filtration::contains(&xi, t));
    } else {
        rep.witnesses.push("R-integrality checked p-locally on Sylow images only".into());
    }
    Ok(all)
}

fn screen_good_squarefree(ctx: &CurveContext, s: u64, rep: &mut VerificationReport) -> bool {
    if !arith::is_square_free(s) {
        rep.hypothesis("S square-free", HypothesisStatus::Fail, format!("{s}"));
        return false;
    }
    rep.hypothesis("S square-free", HypothesisStatus::Pass, "");
    let bad: Vec<u64> = arith::prime_divisors(s).into_iter().filter(|&l| !ctx.profile.curve.is_good(l)).collect();
    if !bad.is_empty() {
        rep.hypothesis("all l | S good", HypothesisStatus::Fail, format!("bad primes {bad:?}"));
        return false;
    }
    rep.hypothesis("all l | S good", HypothesisStatus::Pass, "");
    true
}

/// E(F_l)[p] cyclic for every l | S and every non-inverted p (only p | d1 can fail).
fn screen_cyclicity(ctx: &CurveContext, s: u64, only_p: Option<u64>, rep: &mut VerificationReport) -> Result<bool> {
    let mut failures = Vec::new();
    for l in arith::prime_divisors(s) {
        let st = ctx.structure(l)?;
        for p in arith::prime_divisors(st.d1) {
            if ctx.spec.is_inverted(p) || only_p.is_some_and(|q| q != p) {
                continue;
            }
            failures.push(format!("E(F_{l})[{p}] not cyclic (d1 = {})", st.d1));
        }
    }
    if failures.is_empty() {
        rep.hypothesis("E(F_l)[p] cyclic", HypothesisStatus::Pass, "");
        Ok(true)
    } else {
        rep.hypothesis("E(F_l)[p] cyclic", HypothesisStatus::Fail, failures.join("; "));
        Ok(false)
    }
}

/// theta_S in R[G_S] and theta_S in I_S^{r_E}, checked p-locally at every
/// non-inverted p.
pub fn check_rank_part(ctx: &CurveContext, s: u64) -> Result<VerificationReport> {
    let r = ctx.profile.rank as usize;
    let mut rep = VerificationReport::new(ctx.label(), s, "rank_part", r);
    if !screen_good_squarefree(ctx, s, &mut rep) || !screen_cyclicity(ctx, s, None, &mut rep)? {
        return Ok(rep);
    }
    let (sp, b2) = sp_and_b2(&ctx.profile.curve, s)?;
    let cap = ctx.cap(r + sp as usize + b2 as usize + 2, r);
    let data = theta_data(ctx, s)?;
    let ok = membership_block(ctx, &data, s, r, cap, &mut rep)?;
    if !ok {
        rep.inconsistency(format!("theta_S not in R tensor I^{r} at a checked prime"));
    } else if rep.has_extra_zero() {
        rep.witnesses.push(format!(
            "extra zero: ord >= {} > r_E = {r} (b2 = {b2}, eps_f = {})",
            rep.ord_found.unwrap_or(0),
            ctx.eps
        ));
    }
    Ok(rep)
}

/// theta_S in I_S^{sp(S) + b2(S)}.
pub fn check_trivial_zeros(ctx: &CurveContext, s: u64) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new(ctx.label(), s, "trivial_zeros", 0);
    if !arith::is_square_free(s) {
        rep.hypothesis("S square-free", HypothesisStatus::Fail, format!("{s}"));
        return Ok(rep);
    }
    rep.hypothesis("S square-free", HypothesisStatus::Pass, "");
    let (sp, b2) = sp_and_b2(&ctx.profile.curve, s)?;
    let t = (sp + b2) as usize;
    rep.ord_required = t;
    rep.witnesses.push(format!("sp(S) = {sp}, b2(S) = {b2}"));
    if t == 0 {
        rep.witnesses.push("t = 0: vacuous".into());
        return Ok(rep);
    }
    let data = theta_data(ctx, s)?;
    let ok = membership_block(ctx, &data, s, t, ctx.cap(t + 2, t), &mut rep)?;
    if !ok {
        rep.inconsistency(format!("theta_S not in R tensor I^{t} at a checked prime"));
    }
    Ok(rep)
}

/// Leading class of theta_S in (I^r / I^{r+1}) tensor Z/p and its consequences.
pub fn leading_coefficient_report(ctx: &CurveContext, s: u64, p: u64) -> Result<VerificationReport> {
    let r = ctx.profile.rank as usize;
    let mut rep = VerificationReport::new(ctx.label(), s, "leading_coefficient", r);
    if !arith::is_prime(p) || p == 2 {
        rep.hypothesis("p odd prime", HypothesisStatus::Fail, format!("{p}"));
        return Ok(rep);
    }
    if ctx.spec.is_inverted(p) {
        rep.hypothesis("p not inverted", HypothesisStatus::Fail, format!("{p} is inverted in R"));
        return Ok(rep);
    }
    rep.hypothesis("p not inverted", HypothesisStatus::Pass, "");
    if !screen_good_squarefree(ctx, s, &mut rep) || !screen_cyclicity(ctx, s, Some(p), &mut rep)? {
        return Ok(rep);
    }
    let (s1, s2) = p_split(s, p);
    rep.witnesses.push(format!("S1 = {s1}, S2 = {s2}"));
    let data = theta_data(ctx, s)?;
    let (img, route) = prime_image(ctx, &data, s, p)?;
    let (d, xi) = img.clear_denominators();
    if (&d % BigInt::from(p)).is_zero() {
        rep.inconsistency(format!("p-Sylow image not p-integral (denominator {d})"));
        return Ok(rep);
    }
    let ord = filtration::ord_aug_p(&xi, p, r + 1);
    rep.ord_found = Some(ord.lower_bound());
    rep.per_prime.insert(
        p,
        PrimeResult {
            member: Some(filtration::contains_p_local(&xi, r, p)),
            ord: Some(ord),
            route: route.into(),
            note: None,
        },
    );
    let Some(lead) = LeadingImage::compute(&xi, r).filter(|_| filtration::contains_p_local(&xi, r, p)) else {
        rep.inconsistency(format!("theta_S not in Z_(p) tensor I^{r}"));
        return Ok(rep);
    };
    if lead.is_zero_mod_p(p) {
        rep.verdict = Verdict::NotApplicable;
        rep.witnesses.push(format!("leading class vanishes mod {p}: no prediction"));
        return Ok(rep);
    }
    rep.witnesses.push(format!("leading class nonzero mod {p} in I^{r}/I^{}", r + 1));
    match cokernel_order_jt(&ctx.profile, s1, Some(p))? {
        JtResult::PDivides(true) => rep.inconsistency(format!("{p} | J_{s1} although the leading class is nonzero")),
        JtResult::PDivides(false) => rep.witnesses.push(format!("verified: {p} does not divide J_{s1}")),
        JtResult::NeedsComponentData(ls) => rep.witnesses.push(format!(
            "{p} | J_{s1} not evaluable: needs external component-group data at {ls:?}"
        )),
        JtResult::Order(_) => unreachable!("p-part query"),
    }
    let mut prod = BigInt::from(1);
    for l in arith::prime_divisors(s2) {
        prod *= trace_of_frobenius(&ctx.profile.curve, l)? - 2;
    }
    if (&prod % BigInt::from(p)).is_zero() {
        rep.inconsistency(format!("{p} divides prod_(l | S2) (a_l - 2) = {prod}"));
    } else {
        rep.witnesses.push(format!("verified: {p} does not divide prod_(l | S2) (a_l - 2) = {prod}"));
    }
    rep.predictions.push(Prediction {
        statement: format!("Sha(E/Q)[{p}] = 0"),
        trigger: format!("nonzero leading class of theta_{s} mod {p}"),
    });
    Ok(rep)
}
