use std::path::Path;

use treeprune_core::rewrite::print_system;
use treeprune_core::{Classes, Guard};
use treeprune_web::jquery::{extract_rules_from_scripts, fragment_to_rules, ScriptSource};
use treeprune_web::page::page_from_text;
use treeprune_web::{build_page_system, load_page, RuleSink};

fn fixture(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

/// Runs `js` against an empty document and returns the rules as text.
fn rules_of(js: &str) -> (Vec<String>, Vec<String>) {
    let mut sink = RuleSink::new(Classes::new());
    let root = Guard::Atom(sink.classes.intern("html"));
    let out = extract_rules_from_scripts(
        &[ScriptSource {
            name: "t.js".into(),
            text: js.into(),
            first_line: 1,
        }],
        &mut sink,
        &root,
    );
    let shown = sink
        .rules
        .iter()
        .map(|r| {
            format!(
                "{} => {}",
                r.guard.display(&sink.classes),
                r.op.display(&sink.classes)
            )
        })
        .collect();
    (shown, out.warnings)
}

#[test]
fn figure_one_page() {
    let page = load_page(&fixture("example.html"), &[]).unwrap();
    assert_eq!(page.doc.node_count(), 11);
    let ps = build_page_system(&page);
    assert_eq!(ps.selectors.len(), 1);
    let text = print_system(&ps.system);
    assert!(
        text.contains("rule js1 .input_wrap => addchild {div,|@tmp1|}"),
        "{text}"
    );
    let rules: Vec<String> = ps
        .system
        .rules
        .iter()
        .map(|r| {
            format!(
                "{} => {}",
                r.guard.display(&ps.system.classes),
                r.op.display(&ps.system.classes)
            )
        })
        .collect();
    assert_eq!(rules.len(), 4, "{rules:#?}");
    assert!(
        rules
            .iter()
            .any(|r| r.starts_with("#limit => addclass") && r.contains(".warn")),
        "{rules:#?}"
    );
    assert!(
        rules.iter().any(|r| r.contains("=> addchild {input}")),
        "{rules:#?}"
    );
    assert!(
        rules
            .iter()
            .any(|r| r.contains("=> addchild {a") && r.contains(".delete")),
        "{rules:#?}"
    );
    // `x` is updated, so `html(x)` is unknown text and adds nothing.
    assert_eq!(ps.script_rules, 4);
}

#[test]
fn no_limit_page() {
    let page = load_page(&fixture("example-up.html"), &[]).unwrap();
    assert_eq!(page.doc.node_count(), 8);
    let ps = build_page_system(&page);
    assert_eq!(ps.selectors.len(), 1);
    assert_eq!(ps.system.rules.len(), 3);
}

#[test]
fn worked_example_chain() {
    let (rules, warnings) =
        rules_of("$('.input_wrap').find('.delete').parent('div').addClass('deleted');");
    assert_eq!(
        rules,
        vec!["(and div (down (and .delete (up* (up .input_wrap))))) => addclass {.deleted}"]
    );
    assert!(warnings.is_empty(), "{warnings:?}");
}

#[test]
fn direct_add_class() {
    let (rules, _) = rules_of("$('#limit').addClass('warn');");
    assert_eq!(rules, vec!["#limit => addclass {.warn}"]);
}

#[test]
fn untracked_selection_is_top() {
    let (rules, warnings) =
        rules_of("function f(x) { $(x).addClass('b'); }\nvar q = 1; q = 2;\n$(q).addClass('c');");
    assert!(
        rules.contains(&"true => addclass {.b}".to_string()),
        "{rules:?}"
    );
    assert!(
        rules.contains(&"true => addclass {.c}".to_string()),
        "{rules:?}"
    );
    assert_eq!(
        warnings.iter().filter(|w| w.contains("untracked")).count(),
        2,
        "{warnings:?}"
    );
}

#[test]
fn handlers_bind_this() {
    let (rules, warnings) = rules_of(
        "$('.a').each(function () { $(this).addClass('b'); });\n\
         $('.a').each(function (i, e) { $(e).addClass('c'); });\n\
         $('ul').on('click', 'li', function () { var $t = $(this); $t.addClass('d'); });\n\
         $('.h').hover(function (el) { $(el).addClass('e'); }, function () { $(this).addClass('f'); });",
    );
    assert_eq!(
        rules,
        vec![
            ".a => addclass {.b}",
            ".a => addclass {.c}",
            "(and li (up* (up ul))) => addclass {.d}",
            ".h => addclass {.e}",
            ".h => addclass {.f}",
        ]
    );
    assert!(warnings.is_empty(), "{warnings:?}");
}

#[test]
fn placeholder_pattern() {
    // The shape of the focus handler that makes `#search .touched` reachable.
    let js = "(function($) {\n\
                function supportsInputPlaceholder() { var el = document.createElement('input'); return 'placeholder' in el; }\n\
                $(function() {\n\
                  if (!supportsInputPlaceholder()) {\n\
                    var searchInput = $('#searchInput'),\n\
                      placeholder = searchInput.attr('placeholder');\n\
                    searchInput.val(placeholder).focus(function() {\n\
                       var $this = $(this);\n\
                       $this.addClass('touched');\n\
                    });\n\
                  }\n\
                });\n\
              })(jQuery);";
    let (rules, warnings) = rules_of(js);
    assert_eq!(rules, vec!["#searchInput => addclass {.touched}"]);
    assert_eq!(warnings.len(), 1, "{warnings:?}");
    assert!(warnings[0].contains("attr"), "{warnings:?}");
}

#[test]
fn stack_functions() {
    let (rules, _) = rules_of(
        "$('.a').children('.b').end().addClass('x');\n\
         $('.a').closest('div').addClass('y');\n\
         $('.a').has('p').addClass('z');\n\
         $('.a').next().addClass('n');\n\
         $('.a').parents('.p').addClass('q');\n\
         $('.a').find('.b').addBack().addClass('w');\n\
         $('.a').fadeIn(200).slideUp().eq(2).removeClass('k').addClass('v');",
    );
    assert_eq!(
        rules,
        vec![
            ".a => addclass {.x}",
            "(and div (down* .a)) => addclass {.y}",
            "(and .a (down* (down p))) => addclass {.z}",
            "(up (down .a)) => addclass {.n}",
            "(and .p (down* (down .a))) => addclass {.q}",
            "(or (and .b (up* (up .a))) .a) => addclass {.w}",
            ".a => addclass {.v}",
        ]
    );
}

#[test]
fn unsupported_functions_abort_the_chain() {
    let (rules, warnings) = rules_of("$('.a').toggleClass('t').addClass('u');\n$('.a').width();\n$('.a').css('x', 1).addClass('v');");
    assert!(rules.is_empty(), "{rules:?}");
    assert_eq!(warnings.len(), 2, "{warnings:?}");
    assert!(warnings[0].starts_with("t.js:1:") && warnings[0].contains("toggleClass"));
}

#[test]
fn tracked_variables_and_strings() {
    let (rules, _) = rules_of(
        "var eles = $('.m');\nvar row = '<tr class=\"r\">' + name + '</tr>';\neles.addClass('b');\neles.append(row);\n\
         for (var i = 0; i < 3; i++) { var t = $('.z'); t.addClass('c'); }",
    );
    assert_eq!(
        rules,
        vec![
            ".m => addclass {.b}",
            ".m => addchild {tr,.r}",
            "true => addclass {.c}"
        ]
    );
}

#[test]
fn user_defined_functions() {
    let (rules, _) = rules_of(
        "$.fn.mark = function (c) { this.addClass(c); };\n$('.a').mark('m');\n$('.b').mark('n');",
    );
    assert_eq!(rules, vec![".a => addclass {.m}", ".b => addclass {.n}"]);
}

#[test]
fn context_argument_and_document() {
    let (rules, _) = rules_of("$(document).ready(function () { $('.c', this).addClass('x'); });\n$(document).addClass('y');");
    assert_eq!(
        rules,
        vec![
            "(and .c (up* (up html))) => addclass {.x}",
            "html => addclass {.y}"
        ]
    );
}

#[test]
fn fragments() {
    let mut sink = RuleSink::new(Classes::new());
    let base = Guard::Atom(sink.classes.intern(".input_wrap"));
    let out = fragment_to_rules(
        &mut sink,
        "<div><input/><a class=\"delete\"></a></div>",
        &base,
    );
    assert_eq!(out.added, 3);
    let shown: Vec<String> = sink
        .rules
        .iter()
        .map(|r| {
            format!(
                "{} => {}",
                r.guard.display(&sink.classes),
                r.op.display(&sink.classes)
            )
        })
        .collect();
    assert_eq!(
        shown,
        vec![
            ".input_wrap => addchild {div,|@tmp1|}",
            "|@tmp1| => addchild {input}",
            "|@tmp1| => addchild {a,.delete}"
        ]
    );
    assert_eq!(fragment_to_rules(&mut sink, "<p/>", &base).added, 1);
    assert_eq!(fragment_to_rules(&mut sink, "", &base).added, 0);
    // Fresh markers per call.
    fragment_to_rules(&mut sink, "<ul><li></li></ul>", &base);
    assert!(sink.classes.get("@tmp2").is_some());
    let coarse = fragment_to_rules(&mut sink, "<div class=", &base);
    assert!(coarse.coarse && sink.coarse);
    assert_eq!(coarse.added, 3);
}

#[test]
fn inline_and_linked_sources() {
    let page = page_from_text(
        "p.html",
        "<html><head><link rel=\"stylesheet\" href=\"s.css\"></head><body><div class=a></div>\
         <script src=\"app.js\"></script></body></html>",
        |h| match h {
            "s.css" => Ok(("s.css".into(), ".a .b, .c {}".into())),
            _ => Ok((h.into(), "$('.a').append('<p class=\"b\"></p>');".into())),
        },
    )
    .unwrap();
    let ps = build_page_system(&page);
    assert_eq!(ps.selectors.len(), 2);
    assert_eq!(ps.system.rules.len(), 1);
    assert_eq!(ps.selectors[0].source, "s.css");
}
