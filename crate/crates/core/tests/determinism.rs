use tropdeg::examples::ExampleSpec;
use tropdeg::par::Exec;
use tropdeg::report::{embedding_report, example_report, lg_report, ring_report, simplicity_report, to_canonical_string};
use tropdeg::svg::render_svg;

/// Every report of one example, built from scratch.
fn all_reports(spec: &ExampleSpec) -> Vec<String> {
    let p = spec.build().unwrap();
    let mut out = vec![
        to_canonical_string(&example_report(&p).unwrap()),
        to_canonical_string(&simplicity_report(&p).unwrap()),
        to_canonical_string(&embedding_report(&p).unwrap()),
        to_canonical_string(&ring_report(&p.space, 2).unwrap()),
    ];
    if p.slice.is_some() && spec.name == "quintic" {
        out.push(to_canonical_string(&lg_report(&p).unwrap()));
    }
    if p.space.dim() == 2 && p.space.ambient_dim() <= 3 {
        out.push(render_svg(&p.space).unwrap());
    }
    out
}

fn check(spec: ExampleSpec) {
    let a = all_reports(&spec);
    let b = all_reports(&spec);
    assert_eq!(a, b, "{spec:?}: two runs differ");
    // the sequential fallback produces the same bytes as the parallel path
    let c = Exec::Sequential.run(|| all_reports(&spec));
    assert_eq!(a, c, "{spec:?}: sequential run differs");
}

#[test]
fn k3_reports_are_reproducible() {
    check(ExampleSpec::kp1_2(2));
}

#[test]
fn quintic_reports_are_reproducible() {
    check(ExampleSpec::quintic(3));
}

#[test]
fn hypercube_reports_are_reproducible() {
    check(ExampleSpec::hypercube(2));
}
