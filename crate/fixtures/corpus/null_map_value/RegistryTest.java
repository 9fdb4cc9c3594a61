package demo;

import org.junit.Test;
import static org.junit.Assert.assertEquals;

public class RegistryTest {
    @Test
    public void unknownKeyHasZeroLength() {
        assertEquals(0, new Registry().showBug("missing"));
    }
}
