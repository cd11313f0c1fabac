//! Graphical representation of a run: one vertical ray per site, time
//! running upward, trees drawn green while standing and red while burning.

use std::fmt::Write;

use crate::engine::RunSummary;
use crate::io::IoError;

/// Sites `first_site..=last_site` over times `[t0, t1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvgWindow {
    pub first_site: u64,
    pub last_site: u64,
    pub t0: f64,
    pub t1: f64,
}

impl SvgWindow {
    /// Every instantiated site up to `max_sites`, over the whole run.
    pub fn whole(run: &RunSummary, max_sites: u64) -> Self {
        let last = run.sites_materialized.saturating_sub(1).min(max_sites.saturating_sub(1));
        SvgWindow { first_site: 0, last_site: last, t0: 0.0, t1: run.end_time }
    }

    fn contains_site(&self, x: u64) -> bool {
        (self.first_site..=self.last_site).contains(&x)
    }

    fn contains_time(&self, t: f64) -> bool {
        self.t0 <= t && t <= self.t1
    }

    fn clip(&self, from: f64, to: f64) -> Option<(f64, f64)> {
        let (a, b) = (from.max(self.t0), to.min(self.t1));
        (a < b).then_some((a, b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub site: u64,
    pub from: f64,
    pub to: f64,
    pub burning: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneArrow {
    pub from_site: u64,
    pub t_from: f64,
    pub t_to: f64,
    pub realized: bool,
}

/// Everything drawn, in model coordinates and drawing order.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub window: SvgWindow,
    pub segments: Vec<Segment>,
    pub plants: Vec<(u64, f64)>,
    pub arrows: Vec<SceneArrow>,
}

impl Scene {
    pub fn build(run: &RunSummary, window: SvgWindow) -> Result<Self, IoError> {
        if window.last_site < window.first_site || !(window.t1 > window.t0) {
            return Err(IoError::EmptyWindow(format!(
                "sites {}..={}, times [{}, {}]",
                window.first_site, window.last_site, window.t0, window.t1
            )));
        }
        if run.timelines.is_empty() && run.sites_materialized > 0 {
            return Err(IoError::MissingTimelines);
        }
        let mut segments = Vec::new();
        let mut plants = Vec::new();
        for tl in run.timelines.iter().filter(|tl| window.contains_site(tl.site)) {
            for e in &tl.episodes {
                if window.contains_time(e.plant_time) {
                    plants.push((tl.site, e.plant_time));
                }
                let green_end = e.ignite_time.or(e.extinguish_time).unwrap_or(f64::INFINITY);
                if let Some((from, to)) = window.clip(e.plant_time, green_end) {
                    segments.push(Segment { site: tl.site, from, to, burning: false });
                }
                if let Some(ignite) = e.ignite_time {
                    let end = e.extinguish_time.unwrap_or(f64::INFINITY);
                    if let Some((from, to)) = window.clip(ignite, end) {
                        segments.push(Segment { site: tl.site, from, to, burning: true });
                    }
                }
            }
        }
        let mut arrows: Vec<SceneArrow> = run
            .arrows
            .iter()
            .filter(|a| window.contains_site(a.from_site) && window.contains_site(a.from_site + 1))
            .map(|a| SceneArrow {
                from_site: a.from_site,
                t_from: a.source_ignite,
                t_to: a.target_ignite.unwrap_or(a.source_ignite + a.delay),
                realized: a.target_ignite.is_some(),
            })
            .filter(|a| window.contains_time(a.t_from) && window.contains_time(a.t_to))
            .collect();
        segments.sort_by(|a, b| (a.site, a.from, a.burning).partial_cmp(&(b.site, b.from, b.burning)).expect("finite"));
        plants.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        arrows.sort_by(|a, b| (a.from_site, a.t_from, a.t_to).partial_cmp(&(b.from_site, b.t_from, b.t_to)).expect("finite"));
        Ok(Scene { window, segments, plants, arrows })
    }

    pub fn to_svg(&self) -> String {
        const MARGIN: f64 = 40.0;
        const SITE_GAP: f64 = 24.0;
        const HEIGHT: f64 = 600.0;
        let w = self.window;
        let sites = (w.last_site - w.first_site) as f64;
        let scale = HEIGHT / (w.t1 - w.t0);
        let px = |x: u64| MARGIN + (x - w.first_site) as f64 * SITE_GAP;
        let py = |t: f64| MARGIN + (w.t1 - t) * scale;
        let width = 2.0 * MARGIN + sites * SITE_GAP;
        let height = 2.0 * MARGIN + HEIGHT;

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
        );
        s.push_str(concat!(
            "<defs><marker id=\"head\" viewBox=\"0 0 6 6\" refX=\"6\" refY=\"3\" markerWidth=\"6\" markerHeight=\"6\" orient=\"auto\">",
            "<path d=\"M0,0 L6,3 L0,6 z\" fill=\"black\"/></marker></defs>\n"
        ));
        s.push_str("<g id=\"axes\" stroke=\"#bbbbbb\" stroke-width=\"1\">\n");
        for x in w.first_site..=w.last_site {
            let _ = writeln!(s, r#"<line class="ray" x1="{0:.3}" y1="{1:.3}" x2="{0:.3}" y2="{2:.3}"/>"#, px(x), py(w.t0), py(w.t1));
        }
        s.push_str("</g>\n<g id=\"labels\" font-size=\"10\" text-anchor=\"middle\">\n");
        for x in w.first_site..=w.last_site {
            let _ = writeln!(s, r#"<text x="{:.3}" y="{:.3}">{x}</text>"#, px(x), py(w.t0) + 14.0);
        }
        let _ = writeln!(s, r#"<text x="{:.3}" y="{:.3}" text-anchor="end">{}</text>"#, MARGIN - 8.0, py(w.t0), w.t0);
        let _ = writeln!(s, r#"<text x="{:.3}" y="{:.3}" text-anchor="end">{}</text>"#, MARGIN - 8.0, py(w.t1), w.t1);
        s.push_str("</g>\n<g id=\"segments\" stroke-width=\"4\">\n");
        for seg in &self.segments {
            let (class, colour) = if seg.burning { ("burning", "red") } else { ("occupied", "green") };
            let _ = writeln!(
                s,
                r#"<line class="{class}" stroke="{colour}" x1="{0:.3}" y1="{1:.3}" x2="{0:.3}" y2="{2:.3}"/>"#,
                px(seg.site),
                py(seg.from),
                py(seg.to)
            );
        }
        s.push_str("</g>\n<g id=\"plants\" fill=\"black\">\n");
        for &(x, t) in &self.plants {
            let _ = writeln!(s, r#"<circle class="plant" cx="{:.3}" cy="{:.3}" r="2.5"/>"#, px(x), py(t));
        }
        s.push_str("</g>\n<g id=\"arrows\" stroke=\"black\" stroke-width=\"1\">\n");
        for a in &self.arrows {
            let (class, dash) = if a.realized { ("spread", "") } else { ("attempt", r#" stroke-dasharray="3,3""#) };
            let _ = writeln!(
                s,
                r#"<line class="{class}"{dash} marker-end="url(#head)" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"/>"#,
                px(a.from_site),
                py(a.t_from),
                px(a.from_site + 1),
                py(a.t_to)
            );
        }
        s.push_str("</g>\n</svg>\n");
        s
    }
}

/// SVG document of `run` restricted to `window`.
pub fn render_svg(run: &RunSummary, window: SvgWindow) -> Result<String, IoError> {
    Ok(Scene::build(run, window)?.to_svg())
}
