//! Strassen-Winograd recursion shared by the GF(2) and GF(2^e) layers.
//!
//! Odd fringes are peeled: each dimension is cut down to a multiple of two
//! (twice the column quantum for column dimensions, so every block starts on
//! a word boundary), the even core recurses, and the thin strips left over
//! are multiplied by the base case and patched in. Characteristic two means
//! every subtraction of the classical schedule is an addition.

pub(crate) trait WinogradOperand: Sized {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    /// Number of columns that fill one storage word.
    fn col_quantum(&self) -> usize;
    fn zeros_like(&self, nrows: usize, ncols: usize) -> Self;
    fn window(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self;
    fn paste(&mut self, r0: usize, c0: usize, src: &Self);
    fn xor_at(&mut self, r0: usize, c0: usize, src: &Self);
    fn xor_assign(&mut self, other: &Self);
}

fn sum<M: WinogradOperand>(a: &M, b: &M) -> M {
    let mut s = a.window(0, 0, a.nrows(), a.ncols());
    s.xor_assign(b);
    s
}

/// `a * b`, recursing while every dimension exceeds `crossover`.
pub(crate) fn winograd<M, F>(a: &M, b: &M, crossover: usize, base: &mut F) -> M
where
    M: WinogradOperand,
    F: FnMut(&M, &M) -> M,
{
    let m = a.nrows();
    let l = a.ncols();
    let n = b.ncols();
    let qa = 2 * a.col_quantum();
    let qb = 2 * b.col_quantum();
    let me = m - m % 2;
    let le = l - l % qa;
    let ne = n - n % qb;
    if m.min(l).min(n) <= crossover || me == 0 || le == 0 || ne == 0 {
        return base(a, b);
    }

    let (mh, lh, nh) = (me / 2, le / 2, ne / 2);
    let a11 = a.window(0, 0, mh, lh);
    let a12 = a.window(0, lh, mh, lh);
    let a21 = a.window(mh, 0, mh, lh);
    let a22 = a.window(mh, lh, mh, lh);
    let b11 = b.window(0, 0, lh, nh);
    let b12 = b.window(0, nh, lh, nh);
    let b21 = b.window(lh, 0, lh, nh);
    let b22 = b.window(lh, nh, lh, nh);

    let s1 = sum(&a21, &a22);
    let s2 = sum(&s1, &a11);
    let s3 = sum(&a11, &a21);
    let s4 = sum(&a12, &s2);
    let t1 = sum(&b12, &b11);
    let t2 = sum(&b22, &t1);
    let t3 = sum(&b22, &b12);
    let t4 = sum(&t2, &b21);

    let p1 = winograd(&a11, &b11, crossover, base);
    let p2 = winograd(&a12, &b21, crossover, base);
    let p3 = winograd(&s4, &b22, crossover, base);
    let p4 = winograd(&a22, &t4, crossover, base);
    let p5 = winograd(&s1, &t1, crossover, base);
    let p6 = winograd(&s2, &t2, crossover, base);
    let p7 = winograd(&s3, &t3, crossover, base);

    let c11 = sum(&p1, &p2);
    let u2 = sum(&p1, &p6);
    let u3 = sum(&u2, &p7);
    let u4 = sum(&u2, &p5);
    let c12 = sum(&u4, &p3);
    let c21 = sum(&u3, &p4);
    let c22 = sum(&u3, &p5);

    let mut c = a.zeros_like(m, n);
    c.paste(0, 0, &c11);
    c.paste(0, nh, &c12);
    c.paste(mh, 0, &c21);
    c.paste(mh, nh, &c22);

    if l > le {
        let a_strip = a.window(0, le, me, l - le);
        let b_strip = b.window(le, 0, l - le, ne);
        c.xor_at(0, 0, &base(&a_strip, &b_strip));
    }
    if n > ne {
        let a_top = a.window(0, 0, me, l);
        let b_right = b.window(0, ne, l, n - ne);
        c.paste(0, ne, &base(&a_top, &b_right));
    }
    if m > me {
        let a_bottom = a.window(me, 0, m - me, l);
        c.paste(me, 0, &base(&a_bottom, b));
    }
    c
}
