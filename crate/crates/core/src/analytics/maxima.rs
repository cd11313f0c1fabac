//! Successive maxima recomputed from the raw site histories.

use std::collections::BTreeMap;

use crate::analytics::AnalyticsError;
use crate::engine::records::{Classification, MaximaRecord, RunSummary};

/// Re-derive the successive maxima of a run from its timelines.
///
/// Fire `k` sets a new maximum when it burns past every site burnt by the
/// fires before it. Its excursion is split into stretches of sites ignited
/// at one common instant; each strictly positive gap starts a new stretch.
pub fn extract_maxima(run: &RunSummary) -> Result<Vec<MaximaRecord>, AnalyticsError> {
    if run.timelines.is_empty() && run.sites_materialized > 0 {
        return Err(AnalyticsError::MissingTimelines);
    }
    let mut by_fire: BTreeMap<u64, Vec<(u64, f64)>> = BTreeMap::new();
    let mut burns: Vec<Vec<f64>> = Vec::with_capacity(run.timelines.len());
    for tl in &run.timelines {
        let mut times = Vec::new();
        for ep in &tl.episodes {
            if let (Some(t), Some(k)) = (ep.ignite_time, ep.fire_id) {
                by_fire.entry(k).or_default().push((tl.site, t));
                times.push(t);
            }
        }
        burns.push(times);
    }

    let mut records = Vec::new();
    let mut global_max: i64 = -1;
    for fire in &run.fires {
        let Some(ignitions) = by_fire.get_mut(&fire.k) else { continue };
        ignitions.sort_by_key(|&(x, _)| x);
        let excursion: Vec<(u64, f64)> = ignitions.iter().copied().filter(|&(x, _)| x as i64 > global_max).collect();
        let Some(&(top, _)) = excursion.last() else { continue };
        global_max = top as i64;
        if fire.classification != Classification::Finite {
            continue;
        }
        let mut stretches: Vec<u64> = Vec::new();
        let mut last = f64::NEG_INFINITY;
        for &(_, t) in &excursion {
            match stretches.last_mut() {
                Some(len) if t <= last => *len += 1,
                _ => stretches.push(1),
            }
            last = t;
        }
        let site_burns = &burns[top as usize];
        records.push(MaximaRecord {
            i: records.len() as u64 + 1,
            site: top,
            fire_index: fire.k,
            f_first: site_burns[0],
            f_second: site_burns.get(1).copied(),
            jumps: stretches.len() as u64,
            stretch_lengths: stretches,
        });
    }
    Ok(records)
}
