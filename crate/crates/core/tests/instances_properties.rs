mod common;

use num_rational::Ratio;
use proptest::prelude::*;

use ics_core::analysis::profile;
use ics_core::instances::{random_instance, reduce_bin_packing, reduction_schedule, verify_reduction, Style};
use ics_core::oracle::{bin_packing_decide, BinPackingInstance};
use ics_core::{decide, validate, verify_schedule, Instance};

fn bin_packing() -> impl Strategy<Value = BinPackingInstance> {
    (prop::collection::vec(1i64..=6, 2..=5), 1i64..=20, 1usize..=3).prop_map(|(items, volume, bins)| {
        let bins = bins.min(items.len());
        BinPackingInstance::new(volume, items, bins)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn reduction_properties_hold(bp in bin_packing(), c in 1u32..=3) {
        let out = reduce_bin_packing(&bp, c).unwrap();
        prop_assert!(out.big_b >= 2 * out.a_sum);
        prop_assert_eq!(out.big_b, ((bp.bins * bp.items.len()) as i64).pow(c) * out.a_sum);
        let report = verify_reduction(&bp, &out, c);
        prop_assert!(report.all_hold(), "{}", report.summary());
        if !out.trivial {
            prop_assert_eq!(out.instance.len(), bp.bins * bp.items.len());
            prop_assert_eq!(out.instance.machines, bp.bins);
            let report = validate(&out.instance);
            prop_assert!(report.is_well_formed());
            // Only the last item's long job can outgrow its window, when a_n > V.
            prop_assert_eq!(report.has_short_window(), bp.items[bp.items.len() - 1] > bp.volume);
            for i in 1..=bp.items.len() {
                for k in 1..=bp.bins {
                    prop_assert_eq!(out.job_id(i, k), Some(((i - 1) * bp.bins + k - 1) as u64));
                }
            }
        }
    }

    #[test]
    fn packings_translate_to_schedules(bp in bin_packing()) {
        let out = reduce_bin_packing(&bp, 1).unwrap();
        if let Some(partition) = bin_packing_decide(&bp).unwrap() {
            let s = reduction_schedule(&bp, &out, &partition).unwrap();
            prop_assert!(verify_schedule(&out.instance, &s));
        }
    }

    #[test]
    fn generator_meets_its_style(seed in any::<u64>(), n in 0usize..12, m in 1usize..4, horizon in 1i64..30, cap in 0i64..5) {
        let slack = random_instance(seed, n, m, Style::TargetSlack(cap), horizon).unwrap();
        prop_assert!(validate(&slack).is_valid());
        prop_assert!(profile(&slack).slack <= cap);
        let lambda = Ratio::new(cap + 4, 4);
        let loose = random_instance(seed, n, m, Style::TargetLooseness(lambda), horizon).unwrap();
        prop_assert!(validate(&loose).is_valid());
        prop_assert!(profile(&loose).looseness <= lambda);
        let free = random_instance(seed, n, m, Style::Unconstrained, horizon).unwrap();
        prop_assert!(validate(&free).is_valid());
        prop_assert_eq!(&free, &random_instance(seed, n, m, Style::Unconstrained, horizon).unwrap());
        for inst in [&slack, &loose, &free] {
            prop_assert_eq!(inst.len(), n);
            prop_assert!(inst.jobs.iter().all(|j| j.release < horizon && j.processing <= horizon));
        }
    }

    #[test]
    fn json_round_trip(seed in any::<u64>(), n in 0usize..10) {
        let inst = random_instance(seed, n, 2, Style::Unconstrained, 50).unwrap();
        prop_assert_eq!(Instance::from_json(&inst.to_json()).unwrap(), inst);
    }
}

#[test]
fn reduced_three_bins_is_feasible_and_tight() {
    let bp = BinPackingInstance::new(3, vec![1, 2, 2, 3], 3);
    let out = reduce_bin_packing(&bp, 1).unwrap();
    assert!(decide(&out.instance).unwrap().is_feasible());
    // Volume 2 cannot hold the item of size 3.
    let tight = BinPackingInstance::new(2, vec![1, 2, 2, 3], 3);
    let out = reduce_bin_packing(&tight, 1).unwrap();
    assert!(!decide(&out.instance).unwrap().is_feasible());
}
