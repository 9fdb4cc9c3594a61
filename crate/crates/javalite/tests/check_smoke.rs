use metaprobe_javalite::check::{check, render, Input};

fn diags(src: &str) -> String {
    match check(&[Input { path: "T.java".into(), text: src.into() }]) {
        Ok(_) => String::new(),
        Err(d) => render(&d),
    }
}

#[test]
fn smoke() {
    let ok = r#"
import java.util.*;
public class T {
    static final int K = 3 + 4;
    private int x;
    T(int x) { this.x = x; }
    int get() { return x; }
    static int fib(int n) { return n < 2 ? n : fib(n - 1) + fib(n - 2); }
    public static void main(String[] args) {
        List<Integer> l = new ArrayList<>();
        for (int i = 0; i < K; i++) l.add(i * 2);
        Map<String, Integer> m = new HashMap<>();
        m.put("a", 1);
        int s = 0;
        for (int v : l) s += v;
        String t = "s=" + s + 'c' + 1.5;
        System.out.println(t + new T(5).get() + fib(10));
        try { throw new IllegalStateException("x"); } catch (RuntimeException e) { System.out.println(e.getMessage()); }
        long big = 1L << 40; char c = 'a'; c += 1; byte b = 10;
        Object o = l; if (o instanceof List) { System.out.println(((List<?>) o).size()); }
        int[] arr = {1, 2, 3}; int[][] g = new int[2][3]; g[1][2] = arr.length;
        label: while (true) { break label; }
        switch (s) { case 1: s++; break; default: s--; }
        String str = String.format("%d-%s", 1, "x");
    }
}
"#;
    assert_eq!(diags(ok), "");
    let bad = r#"
public class T {
    int f() { }
    void g() { int y; System.out.println(y); return; int z = 1; }
    void h() { String s = 5; int i = 1L; undefined(); }
}
"#;
    println!("{}", diags(bad));
}
