use crate::error::{Error, Result};
use crate::geometry::Polyline;
use crate::workspace::Workspace;

/// Greedy shortcutting. From the current anchor, a probe walks forward while
/// the anchor can still see it; the last visible probe becomes the next
/// anchor. The output is a subsequence of the input with the same endpoints.
pub fn downsample<W: Workspace + ?Sized>(path: &Polyline, ws: &W) -> Result<Polyline> {
    let pts = &path.points;
    if pts.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            found: pts.len(),
        });
    }
    let last = pts.len() - 1;
    let mut out = vec![pts[0]];
    let mut anchor = 0;
    while anchor < last {
        let mut probe = anchor + 1;
        while probe < last && ws.segment_free(&pts[anchor], &pts[probe + 1]) {
            probe += 1;
        }
        out.push(pts[probe]);
        anchor = probe;
    }
    Ok(Polyline::new(out))
}
