//! Visible text from policy HTML.

use encoding_rs::{Encoding, UTF_8};
use scraper::node::Node;
use scraper::Html;

pub const DEFAULT_LINK_DENSITY: f64 = 0.5;

/// Elements whose content never counts as policy text.
const DROPPED: &[&str] =
    &["script", "style", "nav", "header", "footer", "noscript", "template", "head", "iframe", "svg"];

/// Elements that start a paragraph and are checked for link density.
const BLOCKS: &[&str] = &[
    "p", "div", "section", "article", "main", "aside", "li", "ul", "ol", "dl", "dt", "dd", "table", "tr", "td",
    "th", "blockquote", "pre", "h1", "h2", "h3", "h4", "h5", "h6", "form", "fieldset", "address", "figure",
];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unparseable markup: {0}")]
pub struct UnparseableMarkup(pub String);

/// Picks the encoding from a byte-order mark, then the `Content-Type`
/// charset, then a `<meta>` charset near the top, else UTF-8.
pub fn sniff_encoding(bytes: &[u8], content_type: Option<&str>) -> &'static Encoding {
    if let Some((enc, _)) = Encoding::for_bom(bytes) {
        return enc;
    }
    let from_label = |s: &str| charset_param(s).and_then(|l| Encoding::for_label(l.as_bytes()));
    if let Some(enc) = content_type.and_then(from_label) {
        return enc;
    }
    let head = String::from_utf8_lossy(&bytes[..bytes.len().min(1024)]).to_ascii_lowercase();
    head.match_indices("<meta").find_map(|(i, _)| {
        let tag = &head[i..head[i..].find('>').map_or(head.len(), |e| i + e)];
        from_label(tag)
    })
    .unwrap_or(UTF_8)
}

fn charset_param(s: &str) -> Option<&str> {
    let lower = s.to_ascii_lowercase();
    let at = lower.find("charset=")? + "charset=".len();
    let rest = s[at..].trim_start_matches(['"', '\'']);
    let end = rest.find(|c: char| c == '"' || c == '\'' || c == ';' || c == '>' || c == '/' || c.is_whitespace());
    Some(&rest[..end.unwrap_or(rest.len())]).filter(|l| !l.is_empty())
}

pub fn extract_text(html: &[u8]) -> Result<String, UnparseableMarkup> {
    extract_text_with(html, None, DEFAULT_LINK_DENSITY)
}

/// Drops boilerplate elements and blocks whose share of link text exceeds
/// `max_link_density`. Paragraphs come back separated by blank lines.
pub fn extract_text_with(
    html: &[u8],
    content_type: Option<&str>,
    max_link_density: f64,
) -> Result<String, UnparseableMarkup> {
    let (text, _, _) = sniff_encoding(html, content_type).decode(html);
    if text.contains('\0') {
        return Err(UnparseableMarkup("NUL byte in document".into()));
    }
    let doc = Html::parse_document(&text);
    let mut out = String::new();
    walk(doc.tree.root(), &mut out, max_link_density);
    Ok(privlabel_core::text::normalize(&out))
}

type NodeRef<'a> = ego_tree::NodeRef<'a, Node>;

fn walk(node: NodeRef<'_>, out: &mut String, max_density: f64) {
    match node.value() {
        Node::Text(t) => out.push_str(t),
        Node::Element(e) => {
            let name = e.name();
            if DROPPED.contains(&name) {
                return;
            }
            if name == "br" {
                out.push('\n');
                return;
            }
            let block = BLOCKS.contains(&name);
            if block {
                if link_density(node) > max_density {
                    return;
                }
                out.push_str("\n\n");
            }
            for c in node.children() {
                walk(c, out, max_density);
            }
            if block {
                out.push_str("\n\n");
            }
        }
        _ => {
            for c in node.children() {
                walk(c, out, max_density);
            }
        }
    }
}

/// Share of visible non-space characters that sit inside links.
fn link_density(node: NodeRef<'_>) -> f64 {
    fn count(node: NodeRef<'_>, in_link: bool, total: &mut usize, linked: &mut usize) {
        match node.value() {
            Node::Text(t) => {
                let n = t.chars().filter(|c| !c.is_whitespace()).count();
                *total += n;
                if in_link {
                    *linked += n;
                }
            }
            Node::Element(e) if DROPPED.contains(&e.name()) => {}
            Node::Element(e) => {
                let in_link = in_link || e.name() == "a";
                for c in node.children() {
                    count(c, in_link, total, linked);
                }
            }
            _ => {}
        }
    }
    let (mut total, mut linked) = (0, 0);
    count(node, false, &mut total, &mut linked);
    if total == 0 {
        0.0
    } else {
        linked as f64 / total as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_paragraph() {
        let t = extract_text(b"<html><body><p>We collect data.</p></body></html>").unwrap();
        assert_eq!(t, "We collect data.");
    }

    #[test]
    fn empty_body() {
        assert_eq!(extract_text(b"<html><body></body></html>").unwrap(), "");
        assert_eq!(extract_text(b"").unwrap(), "");
    }

    #[test]
    fn nav_and_link_lists_go() {
        let links: String = (0..20).map(|i| format!("<li><a href=\"/p{i}\">Page {i}</a></li>")).collect();
        let html = format!(
            "<html><head><title>T</title><style>p{{}}</style></head><body><nav><ul>{links}</ul></nav>\
             <div><ul>{links}</ul></div><p>Our policy text stays.</p>\
             <footer>Copyright</footer><script>var x = 1;</script></body></html>"
        );
        assert_eq!(extract_text(html.as_bytes()).unwrap(), "Our policy text stays.");
    }

    #[test]
    fn paragraph_boundaries_and_entities() {
        let t = extract_text(b"<h2>Scope</h2><p>Applies to   all\n apps.</p><p>Tom &amp; Jerry</p>").unwrap();
        assert_eq!(t, "Scope\n\nApplies to all apps.\n\nTom & Jerry");
    }

    #[test]
    fn plain_text_passes_through() {
        let src = "First paragraph here.\n\nSecond one, with 3 words.";
        assert_eq!(extract_text(src.as_bytes()).unwrap(), src);
    }

    #[test]
    fn legacy_encoding_from_meta() {
        let mut html = b"<html><head><meta charset=\"windows-1252\"></head><body><p>caf".to_vec();
        html.push(0xE9);
        html.extend_from_slice(b"</p></body></html>");
        assert_eq!(extract_text(&html).unwrap(), "caf\u{e9}");
        assert_eq!(sniff_encoding(b"x", Some("text/html; charset=ISO-8859-1")).name(), "windows-1252");
    }

    #[test]
    fn nul_is_unparseable() {
        assert!(extract_text(b"<p>a\0b</p>").is_err());
    }
}
