use soscert::gradpipe::*;
use soscert::scalar::rat;

fn main() {
    let m = vec![vec![rat(1), rat(-3)], vec![rat(-3), rat(1)]];
    let inst = certify_copositivity(&m, Some(rat(1)), &CopositivityOptions::default()).unwrap();
    println!("verdict={:?} value={} status={:?} minor={:?}", inst.verdict, inst.certified_value, inst.sdp_status, inst.vanishing_minor);
}
