//! Embedded regression tables: known invariants with the integrands that
//! produce them.

pub struct Case {
    pub n: u32,
    pub d: u32,
    pub m: usize,
    pub label: String,
    pub expression: String,
    pub expected: String,
}

pub struct Suite {
    pub name: &'static str,
    pub about: &'static str,
    /// Largest degree run when `--max-d` is not given.
    pub default_max_d: u32,
    build: fn() -> Vec<Case>,
}

impl Suite {
    pub fn cases(&self) -> Vec<Case> {
        (self.build)()
    }
}

fn case(n: u32, d: u32, m: usize, label: String, expression: String, expected: impl ToString) -> Case {
    Case {
        n,
        d,
        m,
        label,
        expression,
        expected: expected.to_string(),
    }
}

const QUINTIC: [&str; 9] = [
    "2875",
    "4876875/8",
    "8564575000/27",
    "15517926796875/64",
    "229305888887648",
    "248249742157695375",
    "101216230345800061125625/343",
    "192323666400003538944396875/512",
    "367299732093982242625847031250/729",
];

fn quintic() -> Vec<Case> {
    (1..=9)
        .map(|d| case(4, d, 0, format!("d={d}"), "Hypersurface(5)".into(), QUINTIC[d as usize - 1]))
        .collect()
}

fn plane_curves() -> Vec<Case> {
    [1, 1, 12]
        .iter()
        .zip(1u32..)
        .map(|(v, d)| case(2, d, 3 * d as usize - 1, format!("d={d}"), "O1()^2".into(), v))
        .collect()
}

const CONTACT: [&[&str]; 8] = [
    &["2", "1"],
    &["40", "8", "2"],
    &["4160", "512", "72", "12"],
    &["1089024", "96512", "9408", "1024", "128"],
    &["539504640", "37318656", "2780160", "224896", "20000", "2000"],
    &[
        "434591612928",
        "24641224704",
        "1484648448",
        "95545344",
        "6614016",
        "497664",
        "41472",
    ],
    &[
        "518244677713920",
        "24890475282432",
        "1258547527680",
        "67234406400",
        "3812150272",
        "230814720",
        "15059072",
        "1075648",
    ],
    &[
        "858416911346565120",
        "35755655304314880",
        "1557262876803072",
        "71102066589696",
        "3414199762944",
        "173116293120",
        "9319309312",
        "536870912",
        "33554432",
    ],
];

fn contact() -> Vec<Case> {
    let mut out = Vec::new();
    for (row, d) in CONTACT.iter().zip(1u32..) {
        for (a, v) in row.iter().enumerate() {
            let a = a as u32;
            out.push(case(
                3,
                d,
                0,
                format!("d={d} a={a}"),
                format!("Incidency(3)^{a}*Incidency(2)^{}*Contact()", 2 * (d - a) + 1),
                v,
            ));
        }
    }
    out
}

fn manin() -> Vec<Case> {
    (1..=8u32)
        .map(|d| case(1, d, 0, format!("d={d}"), "R1(-1)^2".into(), format!("1/{}", d * d * d)))
        .collect()
}

const CALABI_YAU: [(u32, &str, [&str; 4]); 4] = [
    (5, "[3,3]", ["1053", "423549/8", "6424365", "72925120125/64"]),
    (5, "[4,2]", ["1280", "92448", "422690816/27", "3883914084"]),
    (6, "[3,2,2]", ["720", "22518", "4834592/3", "672808059/4"]),
    (7, "[2,2,2,2]", ["512", "9792", "11239424/27", "25705160"]),
];

fn calabi_yau() -> Vec<Case> {
    let mut out = Vec::new();
    for (n, degrees, values) in CALABI_YAU {
        for (v, d) in values.iter().zip(1u32..) {
            out.push(case(n, d, 0, format!("{degrees} d={d}"), format!("Hypersurface({degrees})"), v));
        }
    }
    out
}

fn cubic_surface() -> Vec<Case> {
    ["27", "27", "84", "540", "5616", "82944", "1608768", "38928384"]
        .iter()
        .zip(1u32..)
        .map(|(v, d)| {
            case(
                3,
                d,
                0,
                format!("d={d}"),
                format!("1/{}*Incidency(2)^{}*Hypersurface(3)", 3u64.pow(d - 1), d - 1),
                v,
            )
        })
        .collect()
}

// Only the line rows: the published conic rows have 3a+2b+c = 11, which is
// not the dimension 9 left by Hypersurface(2) on M_{0,0}(P^5, 2).
const QUADRIC: [(u32, u32, u32, u32, &str); 5] = [
    (1, 0, 0, 5, "20"),
    (1, 0, 1, 3, "12"),
    (1, 1, 0, 2, "4"),
    (1, 0, 2, 1, "8"),
    (1, 1, 1, 0, "4"),
];

fn quadric() -> Vec<Case> {
    QUADRIC
        .iter()
        .map(|&(d, a, b, c, v)| {
            case(
                5,
                d,
                0,
                format!("d={d} (a,b,c)=({a},{b},{c})"),
                format!("Incidency(4)^{a}*Incidency(3)^{b}*Incidency(2)^{c}*Hypersurface(2)"),
                v,
            )
        })
        .collect()
}

fn tangency() -> Vec<Case> {
    (1..=6i64)
        .map(|z| {
            case(
                2,
                1,
                2,
                format!("z={z}"),
                format!("{z}*O1_i(1)*({z}*O1_i(1)+Psi([1,0]))*O1_i(2)^2"),
                z * (z - 1),
            )
        })
        .collect()
}

fn flex() -> Vec<Case> {
    (1..=6i64)
        .map(|z| case(2, 1, 1, format!("z={z}"), format!("Jet(2,{z})"), 3 * z * (z - 2)))
        .collect()
}

pub const SUITES: &[Suite] = &[
    Suite {
        name: "quintic",
        about: "degree-d invariants of the quintic threefold",
        default_max_d: 5,
        build: quintic,
    },
    Suite {
        name: "planecurves",
        about: "rational plane curves through 3d-1 points",
        default_max_d: 3,
        build: plane_curves,
    },
    Suite {
        name: "contact",
        about: "rational contact curves in P^3 through a points and 2(d-a)+1 lines",
        default_max_d: 4,
        build: contact,
    },
    Suite {
        name: "manin",
        about: "multiple-cover contributions 1/d^3",
        default_max_d: 4,
        build: manin,
    },
    Suite {
        name: "cy",
        about: "complete-intersection Calabi-Yau threefolds",
        default_max_d: 2,
        build: calabi_yau,
    },
    Suite {
        name: "cubic",
        about: "rational curves on a cubic surface through d-1 points",
        default_max_d: 4,
        build: cubic_surface,
    },
    Suite {
        name: "quadric",
        about: "lines in a quadric fourfold",
        default_max_d: 1,
        build: quadric,
    },
    Suite {
        name: "tangency",
        about: "lines through a point tangent to a plane curve of degree z",
        default_max_d: 1,
        build: tangency,
    },
    Suite {
        name: "flex",
        about: "flex lines of a plane curve of degree z",
        default_max_d: 1,
        build: flex,
    },
];

pub fn find(name: &str) -> Option<&'static Suite> {
    SUITES.iter().find(|s| s.name == name)
}
