package demo;

public class HashBucket {
    private final int buckets;

    public HashBucket(int buckets) {
        this.buckets = buckets;
    }

    public int showBug(String input) {
        int hash = input.hashCode();
        int index = Math.abs(hash) % buckets;
        return index;
    }
}
